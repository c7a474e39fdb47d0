//! Second-quantized route to the `k`-body reduced density matrix.

use nalgebra::DMatrix;

use super::density::DensityMatrix;
use super::occupation::{factorial, FockSector, FockState};
use super::state::DEFAULT_STORAGE_CAP;
use crate::{Error, Result, C64};

/// `γ_{IJ} = ((N−k)!/N!) Σ_m ⟨m| a_I Ψ⟩ conj⟨m| a_J Ψ⟩`, summed over the
/// `(N−k)`-particle occupation vectors `m`, which equals
/// `((N−k)!/N!)·⟨a†_J a_I⟩` and has unit trace.
pub fn krdm_from_fock(fock: &FockState, k: usize) -> Result<DensityMatrix> {
    krdm_from_amplitudes(fock.n(), fock.modes(), fock.amplitudes().iter().map(|(o, c)| (o.as_slice(), *c)), k)
}

/// Same as [`krdm_from_fock`] for a coefficient vector over a sector.
pub fn krdm_from_sector(sector: &FockSector, coeffs: &[C64], k: usize) -> Result<DensityMatrix> {
    if coeffs.len() != sector.len() {
        return Err(Error::DimensionMismatch(coeffs.len(), sector.len()));
    }
    krdm_from_amplitudes(
        sector.n(),
        sector.modes(),
        sector.states().iter().map(|o| o.as_slice()).zip(coeffs.iter().copied()),
        k,
    )
}

fn krdm_from_amplitudes<'a>(
    n: usize,
    modes: usize,
    amplitudes: impl Iterator<Item = (&'a [usize], C64)>,
    k: usize,
) -> Result<DensityMatrix> {
    if k == 0 || k > n {
        return Err(Error::OrderOutOfRange { k, max: n });
    }
    let dim_k = modes.pow(k as u32);
    let target = FockSector::new(n - k, modes, DEFAULT_STORAGE_CAP)?;
    // rows: (N−k)-particle occupation, columns: ordered k-tuple I
    let mut v = DMatrix::<C64>::zeros(target.len(), dim_k);
    let mut occ = vec![0usize; modes];
    for (o, c) in amplitudes {
        if c == C64::new(0.0, 0.0) {
            continue;
        }
        occ.copy_from_slice(o);
        annihilate(&mut occ, k, 0, c, &target, &mut v, modes);
    }
    let gamma = v.transpose() * v.map(|z| z.conj()) * C64::new(factorial(n - k) / factorial(n), 0.0);
    DensityMatrix::new(k, modes, gamma)
}

/// Applies `a_{i_r}` for the remaining `r` slots, accumulating `⟨m|a_I Ψ⟩`.
fn annihilate(
    occ: &mut [usize],
    remaining: usize,
    prefix: usize,
    amp: C64,
    target: &FockSector,
    v: &mut DMatrix<C64>,
    modes: usize,
) {
    if remaining == 0 {
        let row = target.index_of(occ).expect("occupation lies in the target sector");
        v[(row, prefix)] += amp;
        return;
    }
    for p in 0..modes {
        let m = occ[p];
        if m == 0 {
            continue;
        }
        occ[p] -= 1;
        annihilate(occ, remaining - 1, prefix * modes + p, amp * (m as f64).sqrt(), target, v, modes);
        occ[p] += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::density::{partial_trace_dense, trace_distance};
    use crate::fock::occupation::from_fock;
    use crate::rng;

    #[test]
    fn condensate_one_body() {
        let g = krdm_from_fock(&FockState::basis_state(vec![5, 0, 0]), 1).unwrap();
        assert!((g.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((g.matrix().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_two_frame_weights() {
        let g = krdm_from_fock(&FockState::basis_state(vec![2, 2]), 2).unwrap();
        let m = g.matrix();
        assert!((m[(0, 0)].re - 1.0 / 6.0).abs() < 1e-15);
        assert!((m[(3, 3)].re - 1.0 / 6.0).abs() < 1e-15);
        // the (1,1) frame vector is (|01⟩+|10⟩)/√2
        let w11 = 0.5 * (m[(1, 1)] + m[(1, 2)] + m[(2, 1)] + m[(2, 2)]).re;
        assert!((w11 - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn agrees_with_dense_partial_trace() {
        let mut r = rng::seeded(3);
        for n in 1..=5 {
            for m in 1..=4 {
                let f = FockState::random(&mut r, n, m).unwrap();
                let dense = from_fock(&f).unwrap();
                for k in 1..=n {
                    let a = krdm_from_fock(&f, k).unwrap();
                    let b = partial_trace_dense(&dense, k).unwrap();
                    assert!((a.trace().re - 1.0).abs() < 1e-10);
                    assert!(trace_distance(&a, &b).unwrap() < 1e-10, "n={n} m={m} k={k}");
                }
            }
        }
    }
}
