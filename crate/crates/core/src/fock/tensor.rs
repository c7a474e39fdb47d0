//! Index arithmetic for `k`-fold tensor powers of a one-body space.
//!
//! A `k`-body index `I = (p₁,…,p_k)` is stored as `Σ p_i M^{k-1-i}`, so slot 0 is the
//! most significant digit. For spin-carrying modes `p = n·s + σ`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result, C64};

pub fn tensor_dim(local: usize, order: usize) -> Option<usize> {
    local.checked_pow(u32::try_from(order).ok()?)
}

pub fn digits(mut index: usize, local: usize, order: usize) -> Vec<usize> {
    let mut out = vec![0; order];
    for slot in (0..order).rev() {
        out[slot] = index % local;
        index /= local;
    }
    out
}

pub fn flat_index(digits: &[usize], local: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * local + d)
}

/// `v^{⊗n}` as a flat vector.
pub fn product_tensor(v: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![C64::new(1.0, 0.0)];
    for _ in 0..n {
        out = kron_vec(v, &out);
    }
    out
}

/// `a ⊗ b` with `a` in the leading slots.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        out.extend(b.iter().map(|&y| x * y));
    }
    out
}

/// Normalized symmetrization of `φ₁^{⊗counts₁} ⊗ ··· ⊗ φ_ℓ^{⊗counts_ℓ}`.
///
/// Built by the recursion `S(c) = Σ_j φ_j ⊗ S(c − e_j)`, which sums every distinct
/// arrangement of the orbitals over the slots exactly once.
pub fn symmetric_product(orbitals: &[DVector<C64>], counts: &[usize]) -> Result<Vec<C64>> {
    if orbitals.len() != counts.len() {
        return Err(Error::DimensionMismatch(orbitals.len(), counts.len()));
    }
    let mut memo: HashMap<Vec<usize>, Vec<C64>> = HashMap::new();
    let mut v = build(orbitals, counts.to_vec(), &mut memo);
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Invariant("symmetric product vanished".into()));
    }
    v.iter_mut().for_each(|z| *z /= norm);
    Ok(v)
}

fn build(orbitals: &[DVector<C64>], counts: Vec<usize>, memo: &mut HashMap<Vec<usize>, Vec<C64>>) -> Vec<C64> {
    if counts.iter().all(|&c| c == 0) {
        return vec![C64::new(1.0, 0.0)];
    }
    if let Some(v) = memo.get(&counts) {
        return v.clone();
    }
    let m = orbitals[0].len();
    let mut out: Vec<C64> = Vec::new();
    for j in 0..counts.len() {
        if counts[j] == 0 {
            continue;
        }
        let mut rest = counts.clone();
        rest[j] -= 1;
        let tail = build(orbitals, rest, memo);
        if out.is_empty() {
            out = vec![C64::new(0.0, 0.0); m * tail.len()];
        }
        for (p, &phi) in orbitals[j].iter().enumerate() {
            if phi == C64::new(0.0, 0.0) {
                continue;
            }
            let block = &mut out[p * tail.len()..(p + 1) * tail.len()];
            for (o, &t) in block.iter_mut().zip(&tail) {
                *o += phi * t;
            }
        }
    }
    memo.insert(counts, out.clone());
    out
}

/// Split of each `k`-body index over `(d·s)` modes into its spatial and spin parts.
fn split_table(d: usize, s: usize, k: usize) -> Vec<(usize, usize)> {
    let total = (d * s).pow(k as u32);
    (0..total)
        .map(|i| {
            let dig = digits(i, d * s, k);
            let sp: Vec<usize> = dig.iter().map(|p| p / s).collect();
            let sn: Vec<usize> = dig.iter().map(|p| p % s).collect();
            (flat_index(&sp, d), flat_index(&sn, s))
        })
        .collect()
}

fn check_square(m: &DMatrix<C64>, expected: usize) -> Result<()> {
    if m.nrows() != expected || m.ncols() != expected {
        return Err(Error::DimensionMismatch(m.nrows(), expected));
    }
    Ok(())
}

/// Reassembles `A ⊗ B` on `(d·s)^k` from a spatial `d^k` factor and a spin `s^k` factor.
pub fn interleave(spatial: &DMatrix<C64>, spin: &DMatrix<C64>, d: usize, s: usize, k: usize) -> Result<DMatrix<C64>> {
    check_square(spatial, d.pow(k as u32))?;
    check_square(spin, s.pow(k as u32))?;
    let table = split_table(d, s, k);
    let n = table.len();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let (ai, bi) = table[i];
        let (aj, bj) = table[j];
        spatial[(ai, aj)] * spin[(bi, bj)]
    }))
}

/// Partial trace over the spin factor of a `(d·s)^k` operator.
pub fn trace_out_spin(m: &DMatrix<C64>, d: usize, s: usize, k: usize) -> Result<DMatrix<C64>> {
    reduce(m, d, s, k, true)
}

/// Partial trace over the spatial factor of a `(d·s)^k` operator.
pub fn trace_out_space(m: &DMatrix<C64>, d: usize, s: usize, k: usize) -> Result<DMatrix<C64>> {
    reduce(m, d, s, k, false)
}

fn reduce(m: &DMatrix<C64>, d: usize, s: usize, k: usize, keep_space: bool) -> Result<DMatrix<C64>> {
    let table = split_table(d, s, k);
    check_square(m, table.len())?;
    let out_dim = if keep_space { d.pow(k as u32) } else { s.pow(k as u32) };
    let mut out = DMatrix::zeros(out_dim, out_dim);
    for (i, &(ai, bi)) in table.iter().enumerate() {
        for (j, &(aj, bj)) in table.iter().enumerate() {
            if keep_space && bi == bj {
                out[(ai, aj)] += m[(i, j)];
            } else if !keep_space && ai == aj {
                out[(bi, bj)] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::spec::unit_vector;

    #[test]
    fn digits_round_trip() {
        for i in 0..27 {
            assert_eq!(flat_index(&digits(i, 3, 3), 3), i);
        }
        assert_eq!(digits(5, 2, 3), vec![1, 0, 1]);
    }

    #[test]
    fn symmetric_product_of_two_modes() {
        let o = vec![unit_vector(2, 0), unit_vector(2, 1)];
        let v = symmetric_product(&o, &[1, 1]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [0.0, h, h, 0.0];
        for (z, e) in v.iter().zip(expect) {
            assert!((z.re - e).abs() < 1e-15 && z.im == 0.0);
        }
    }

    #[test]
    fn interleave_then_reduce() {
        let a = DMatrix::from_fn(4, 4, |i, j| C64::new((i + 2 * j) as f64, i as f64 - j as f64));
        let mut b = DMatrix::<C64>::zeros(4, 4);
        b[(0, 0)] = C64::new(0.25, 0.0);
        b[(3, 3)] = C64::new(0.75, 0.0);
        let full = interleave(&a, &b, 2, 2, 2).unwrap();
        let back = trace_out_spin(&full, 2, 2, 2).unwrap();
        assert!((back - &a).norm() < 1e-13);
        let spin = trace_out_space(&full, 2, 2, 2).unwrap();
        assert!((spin - b * a.trace()).norm() < 1e-12);
    }
}
