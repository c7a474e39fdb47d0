//! `e^{−iHt}ψ` by full diagonalization or by Lanczos–Krylov steps.

use nalgebra::{DMatrix, DVector};

use super::hamiltonian::SectorMatrix;
use crate::fock::FockState;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationOptions {
    /// Sectors up to this dimension are diagonalized outright.
    pub dense_threshold: usize,
    pub krylov_dim: usize,
    /// Bound on the a-posteriori error estimate of every Krylov substep.
    pub tol: f64,
    /// Substep budget per call before giving up.
    pub max_substeps: usize,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self { dense_threshold: 1500, krylov_dim: 30, tol: 1e-10, max_substeps: 100_000 }
    }
}

pub enum Propagator<'a> {
    Dense { values: Vec<f64>, vectors: DMatrix<f64> },
    Krylov { h: &'a SectorMatrix, opts: PropagationOptions },
}

impl<'a> Propagator<'a> {
    pub fn new(h: &'a SectorMatrix, opts: PropagationOptions) -> Self {
        if h.dim() <= opts.dense_threshold {
            Self::dense(h)
        } else {
            Self::Krylov { h, opts }
        }
    }

    pub fn dense(h: &SectorMatrix) -> Self {
        let eig = h.to_dense().symmetric_eigen();
        Self::Dense { values: eig.eigenvalues.iter().cloned().collect(), vectors: eig.eigenvectors }
    }

    pub fn krylov(h: &'a SectorMatrix, opts: PropagationOptions) -> Self {
        Self::Krylov { h, opts }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self, Self::Dense { .. })
    }

    pub fn evolve(&self, psi: &[C64], t: f64) -> Result<Vec<C64>> {
        if t == 0.0 {
            return Ok(psi.to_vec());
        }
        match self {
            Self::Dense { values, vectors } => {
                let re = vectors.transpose() * DVector::from_iterator(psi.len(), psi.iter().map(|z| z.re));
                let im = vectors.transpose() * DVector::from_iterator(psi.len(), psi.iter().map(|z| z.im));
                let coeffs: Vec<C64> = values
                    .iter()
                    .enumerate()
                    .map(|(i, &e)| C64::new(re[i], im[i]) * C64::from_polar(1.0, -e * t))
                    .collect();
                let cr = DVector::from_iterator(coeffs.len(), coeffs.iter().map(|z| z.re));
                let ci = DVector::from_iterator(coeffs.len(), coeffs.iter().map(|z| z.im));
                let (xr, xi) = (vectors * cr, vectors * ci);
                Ok(xr.iter().zip(xi.iter()).map(|(&a, &b)| C64::new(a, b)).collect())
            }
            Self::Krylov { h, opts } => krylov_evolve(h, psi, t, opts),
        }
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dotc(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Lanczos with full reorthogonalization; each substep keeps the estimate
/// `β₀·β_m·|[e^{−iτT}e₁]_m|` below `tol`, halving `τ` until it does.
fn krylov_evolve(h: &SectorMatrix, psi: &[C64], t: f64, opts: &PropagationOptions) -> Result<Vec<C64>> {
    let n = psi.len();
    let mut v = psi.to_vec();
    let mut remaining = t;
    let mut tau = t;
    let mut substeps = 0;
    while remaining.abs() > 0.0 {
        substeps += 1;
        if substeps > opts.max_substeps {
            return Err(Error::KrylovNoConvergence(opts.max_substeps));
        }
        let beta0 = norm(&v);
        if beta0 == 0.0 {
            return Ok(v);
        }
        let mut q: Vec<Vec<C64>> = vec![v.iter().map(|z| z / beta0).collect()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut w = vec![C64::new(0.0, 0.0); n];
        let m_max = opts.krylov_dim.min(n);
        let mut breakdown = false;
        for j in 0..m_max {
            h.apply(&q[j], &mut w);
            alpha.push(dotc(&q[j], &w).re);
            // two passes keep the basis orthonormal to roundoff
            for _ in 0..2 {
                for qi in &q {
                    let c = dotc(qi, &w);
                    w.iter_mut().zip(qi).for_each(|(x, y)| *x -= y * c);
                }
            }
            let b = norm(&w);
            beta.push(b);
            if b < 1e-13 * beta0.max(1.0) {
                breakdown = true;
                break;
            }
            if j + 1 < m_max {
                q.push(w.iter().map(|z| z / b).collect());
            }
        }
        let m = alpha.len();
        let tmat = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = tmat.symmetric_eigen();
        let beta_m = if breakdown { 0.0 } else { *beta.last().expect("at least one Lanczos step") };
        let propagate_small = |tau: f64| -> Vec<C64> {
            (0..m)
                .map(|i| {
                    (0..m)
                        .map(|k| {
                            let u = eig.eigenvectors[(i, k)] * eig.eigenvectors[(0, k)];
                            C64::from_polar(u, -eig.eigenvalues[k] * tau)
                        })
                        .sum()
                })
                .collect()
        };
        let mut y = propagate_small(tau);
        while beta0 * beta_m * y[m - 1].norm() > opts.tol {
            tau *= 0.5;
            y = propagate_small(tau);
            if tau.abs() < t.abs() * 1e-12 {
                return Err(Error::KrylovNoConvergence(substeps));
            }
        }
        let mut next = vec![C64::new(0.0, 0.0); n];
        for (qi, yi) in q.iter().zip(&y) {
            let c = yi * beta0;
            next.iter_mut().zip(qi).for_each(|(x, z)| *x += z * c);
        }
        v = next;
        remaining -= tau;
        if remaining.abs() < 1e-14 * t.abs() {
            break;
        }
        tau = (tau * 1.5).min(remaining.abs()).copysign(remaining);
    }
    Ok(v)
}

/// Propagates a Fock state of the sector of `h` to time `t`.
pub fn evolve_exact(h: &SectorMatrix, psi0: &FockState, t: f64, opts: PropagationOptions) -> Result<FockState> {
    let v = psi0.to_vector(h.sector())?;
    let out = Propagator::new(h, opts).evolve(&v, t)?;
    let n = norm(&out);
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::Invariant(format!("norm {n} after propagation")));
    }
    FockState::from_vector(h.sector(), &out)
}

#[cfg(test)]
mod tests {
    use super::super::hamiltonian::{build_hamiltonian, HamiltonianSpec};
    use super::*;
    use crate::fock::{FockSector, ModeBasis};
    use crate::hartree::{default_quadrature_order, PotentialSpec};
    use crate::rng;

    fn hamiltonian(d: usize, s: usize, n: usize, v0: f64) -> SectorMatrix {
        let basis = ModeBasis::one_dim(d, s, 1.0).unwrap();
        let v = if v0 == 0.0 { PotentialSpec::zero() } else { PotentialSpec::gaussian(v0, 1.0).unwrap() };
        build_hamiltonian(&HamiltonianSpec::new(basis, &v, n, default_quadrature_order(d)).unwrap()).unwrap()
    }

    fn random_vector(n: usize, seed: u64) -> Vec<C64> {
        let mut r = rng::seeded(seed);
        rng::random_unit_vector(&mut r, n).as_slice().to_vec()
    }

    #[test]
    fn zero_time_is_identity() {
        let h = hamiltonian(3, 1, 3, 1.0);
        let psi = random_vector(h.dim(), 1);
        for p in [Propagator::dense(&h), Propagator::krylov(&h, PropagationOptions::default())] {
            assert_eq!(p.evolve(&psi, 0.0).unwrap(), psi);
        }
    }

    #[test]
    fn free_flow_phases() {
        let h = hamiltonian(3, 2, 3, 0.0);
        let psi = random_vector(h.dim(), 2);
        let out = Propagator::krylov(&h, PropagationOptions::default()).evolve(&psi, 2.3).unwrap();
        for (i, occ) in h.sector().states().iter().enumerate() {
            let e: f64 = occ.iter().enumerate().map(|(p, &m)| m as f64 * (p / 2) as f64).sum();
            assert!((out[i] - psi[i] * C64::from_polar(1.0, -e * 2.3)).norm() < 1e-10);
        }
    }

    #[test]
    fn dense_and_krylov_agree() {
        let h = hamiltonian(3, 2, 4, 1.0);
        let psi = random_vector(h.dim(), 3);
        let opts = PropagationOptions::default();
        for t in [0.1, 1.0, 4.0] {
            let a = Propagator::dense(&h).evolve(&psi, t).unwrap();
            let b = Propagator::krylov(&h, opts).evolve(&psi, t).unwrap();
            let diff = a.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
            assert!(diff < 1e-8, "t={t}: {diff}");
            assert!((norm(&b) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn fock_state_round_trip() {
        let h = hamiltonian(2, 2, 3, 1.0);
        let sector = FockSector::new(3, 4, 1000).unwrap();
        let psi0 = FockState::basis_state(vec![2, 1, 0, 0]);
        let psi = evolve_exact(&h, &psi0, 0.7, PropagationOptions::default()).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-10);
        assert_eq!(psi.to_vector(&sector).unwrap().len(), sector.len());
    }
}
