//! Combinatorial weights of the symmetric-product frame.
//!
//! For a multi-index `a = (a₁,…,a_ℓ)` with `Σ a_j = k`:
//!
//! - exact: `Π binom(N_j, a_j) / binom(N, k)`
//! - mixture: `multinomial(k; a)·Π N_j^{a_j} / N^k`
//! - limit: `multinomial(k; a)·Π n_j^{a_j}`
//!
//! Index ranges are 0-inclusive; that is the convention under which every
//! table sums to one.

use crate::{Error, Result};

/// Products of integers stay exact in `f64` below this bound.
const EXACT_F64: u128 = 1 << 53;
/// `k!` overflows `f64` beyond this order.
const MAX_DIRECT_ORDER: usize = 170;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoefficientKind {
    Exact,
    Mixture,
    Limit,
}

/// What the weights were computed from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Populations(Vec<usize>),
    Fractions(Vec<f64>),
}

/// All `a ∈ ℕ^ell` with `Σ a = k`, in descending lexicographic order.
pub fn multi_indices(ell: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if ell == 0 {
        return out;
    }
    let mut cur = vec![0; ell];
    fill(k, 0, &mut cur, &mut out);
    out
}

fn fill(remaining: usize, pos: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(cur.clone());
        return;
    }
    for v in (0..=remaining).rev() {
        cur[pos] = v;
        fill(remaining - v, pos + 1, cur, out);
    }
}

fn check_index(len: usize, a: &[usize], k: usize) -> Result<()> {
    if a.len() != len {
        return Err(Error::DimensionMismatch(a.len(), len));
    }
    if a.iter().sum::<usize>() != k {
        return Err(Error::IndexOutOfRange(a.to_vec()));
    }
    Ok(())
}

fn binomial_exact(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i + 1) as u128;
    }
    Some(acc)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// `ln multinomial(k; a)`.
fn ln_multinomial(a: &[usize]) -> f64 {
    ln_factorial(a.iter().sum()) - a.iter().map(|&x| ln_factorial(x)).sum::<f64>()
}

fn multinomial(a: &[usize]) -> f64 {
    let k: usize = a.iter().sum();
    if k <= MAX_DIRECT_ORDER {
        let mut acc = 1.0;
        let mut t = 0usize;
        for &aj in a {
            for i in 1..=aj {
                t += 1;
                acc = acc * t as f64 / i as f64;
            }
        }
        acc.round()
    } else {
        ln_multinomial(a).exp()
    }
}

/// `Π binom(N_j, a_j) / binom(N, k)`.
///
/// Evaluated exactly in integers while numerator and denominator both fit in
/// 53 bits; otherwise as `multinomial(k; a)·Π_j [N_j]_{a_j} / [N]_k` with the
/// falling factorials paired factor by factor, which keeps every partial
/// product of order one.
pub fn coeff_exact(populations: &[usize], a: &[usize], k: usize) -> Result<f64> {
    check_index(populations.len(), a, k)?;
    let n: usize = populations.iter().sum();
    if k > n {
        return Err(Error::OrderOutOfRange { k, max: n });
    }
    if a.iter().zip(populations).any(|(&aj, &nj)| aj > nj.min(k)) {
        return Err(Error::IndexOutOfRange(a.to_vec()));
    }
    Ok(exact_weight(populations, a, k, n))
}

/// As [`coeff_exact`], but zero where some `a_j > N_j`.
fn exact_weight(populations: &[usize], a: &[usize], k: usize, n: usize) -> f64 {
    if a.iter().zip(populations).any(|(&aj, &nj)| aj > nj) {
        return 0.0;
    }
    let num = populations
        .iter()
        .zip(a)
        .try_fold(1u128, |acc, (&nj, &aj)| binomial_exact(nj, aj).and_then(|b| acc.checked_mul(b)));
    let den = binomial_exact(n, k);
    if let (Some(num), Some(den)) = (num, den) {
        if num <= EXACT_F64 && den <= EXACT_F64 {
            return num as f64 / den as f64;
        }
    }
    let mut ratio = 1.0;
    let mut t = 0usize;
    for (&nj, &aj) in populations.iter().zip(a) {
        for i in 0..aj {
            ratio *= (nj - i) as f64 / (n - t) as f64;
            t += 1;
        }
    }
    if k <= MAX_DIRECT_ORDER {
        multinomial(a) * ratio
    } else {
        (ln_multinomial(a) + ratio.ln()).exp()
    }
}

/// `multinomial(k; a)·Π N_j^{a_j} / N^k`.
pub fn coeff_mixture(populations: &[usize], a: &[usize], k: usize) -> Result<f64> {
    check_index(populations.len(), a, k)?;
    let n: usize = populations.iter().sum();
    if n == 0 {
        return Err(Error::InvalidParameter("empty populations".into()));
    }
    let fractions: Vec<f64> = populations.iter().map(|&p| p as f64 / n as f64).collect();
    Ok(power_weight(&fractions, a))
}

/// `multinomial(k; a)·Π n_j^{a_j}`.
pub fn coeff_limit(fractions: &[f64], a: &[usize], k: usize) -> Result<f64> {
    check_index(fractions.len(), a, k)?;
    let sum: f64 = fractions.iter().sum();
    if (sum - 1.0).abs() > 1e-12 || fractions.iter().any(|&f| f < 0.0) {
        return Err(Error::FractionsNotNormalized(sum));
    }
    Ok(power_weight(fractions, a))
}

fn power_weight(fractions: &[f64], a: &[usize]) -> f64 {
    let prod: f64 = fractions.iter().zip(a).map(|(&f, &aj)| f.powi(aj as i32)).product();
    if prod == 0.0 {
        return 0.0;
    }
    let k: usize = a.iter().sum();
    if k <= MAX_DIRECT_ORDER {
        multinomial(a) * prod
    } else {
        let ln_prod: f64 = fractions.iter().zip(a).filter(|(_, &aj)| aj > 0).map(|(&f, &aj)| aj as f64 * f.ln()).sum();
        (ln_multinomial(a) + ln_prod).exp()
    }
}

/// Weights of one kind over every multi-index of order `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub kind: CoefficientKind,
    pub k: usize,
    pub entries: Vec<(Vec<usize>, f64)>,
    pub provenance: Provenance,
}

impl CoefficientTable {
    pub fn exact(populations: &[usize], k: usize) -> Result<Self> {
        let n: usize = populations.iter().sum();
        if k > n {
            return Err(Error::OrderOutOfRange { k, max: n });
        }
        let entries = multi_indices(populations.len(), k)
            .into_iter()
            .map(|a| {
                let w = exact_weight(populations, &a, k, n);
                (a, w)
            })
            .collect();
        Ok(Self { kind: CoefficientKind::Exact, k, entries, provenance: Provenance::Populations(populations.to_vec()) })
    }

    pub fn mixture(populations: &[usize], k: usize) -> Result<Self> {
        let entries = multi_indices(populations.len(), k)
            .into_iter()
            .map(|a| coeff_mixture(populations, &a, k).map(|w| (a, w)))
            .collect::<Result<_>>()?;
        Ok(Self { kind: CoefficientKind::Mixture, k, entries, provenance: Provenance::Populations(populations.to_vec()) })
    }

    pub fn limit(fractions: &[f64], k: usize) -> Result<Self> {
        let entries = multi_indices(fractions.len(), k)
            .into_iter()
            .map(|a| coeff_limit(fractions, &a, k).map(|w| (a, w)))
            .collect::<Result<_>>()?;
        Ok(Self { kind: CoefficientKind::Limit, k, entries, provenance: Provenance::Fractions(fractions.to_vec()) })
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn weight(&self, a: &[usize]) -> Option<f64> {
        self.entries.iter().find(|e| e.0 == a).map(|e| e.1)
    }

    pub fn weights(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.1).collect()
    }
}

/// `max_a |c_a − c̃_a|` between the exact and mixture tables.
pub fn max_exact_mixture_gap(populations: &[usize], k: usize) -> Result<f64> {
    let e = CoefficientTable::exact(populations, k)?;
    let m = CoefficientTable::mixture(populations, k)?;
    Ok(e.entries.iter().zip(&m.entries).map(|(x, y)| (x.1 - y.1).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn index_order() {
        assert_eq!(multi_indices(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(multi_indices(3, 1).len(), 3);
        assert_eq!(multi_indices(3, 4).len(), 15);
    }

    #[test]
    fn two_two_values() {
        assert!((coeff_exact(&[2, 2], &[1, 1], 2).unwrap() - 2.0 / 3.0).abs() < 1e-16);
        assert!((coeff_exact(&[2, 2], &[2, 0], 2).unwrap() - 1.0 / 6.0).abs() < 1e-16);
        assert_eq!(coeff_exact(&[2, 2], &[0, 0], 0).unwrap(), 1.0);
        assert_eq!(coeff_mixture(&[2, 2], &[1, 1], 2).unwrap(), 0.5);
        assert_eq!(coeff_mixture(&[2, 2], &[2, 0], 2).unwrap(), 0.25);
        assert_eq!(coeff_limit(&[0.5, 0.5], &[1, 1], 2).unwrap(), 0.5);
        assert_eq!(coeff_limit(&[1.0], &[7], 7).unwrap(), 1.0);
    }

    #[test]
    fn rejects_bad_indices() {
        assert!(coeff_exact(&[2, 2], &[3, 0], 3).is_err());
        assert!(coeff_exact(&[2, 2], &[1, 0], 2).is_err());
        assert!(coeff_exact(&[1, 1], &[1, 2], 3).is_err());
        assert!(coeff_limit(&[0.5, 0.6], &[1, 1], 2).is_err());
    }

    #[test]
    fn large_population_paths_agree() {
        // beyond 2^53 the falling-factorial path is used; compare with u128 arithmetic
        let pops = [1usize << 19, 1 << 19];
        let num = binomial_exact(pops[0], 2).unwrap() * pops[1] as u128;
        let den = binomial_exact(1 << 20, 3).unwrap();
        assert!(num > EXACT_F64);
        let reference = num as f64 / den as f64;
        let w = coeff_exact(&pops, &[2, 1], 3).unwrap();
        assert!((w / reference - 1.0).abs() < 1e-14);
    }

    #[test]
    fn huge_order_uses_logs() {
        let t = CoefficientTable::limit(&[0.5, 0.5], 400).unwrap();
        assert!((t.total() - 1.0).abs() < 1e-10);
    }

    proptest! {
        #[test]
        fn tables_are_normalized(n1 in 1usize..60, n2 in 1usize..60, n3 in 0usize..30, k in 0usize..8) {
            let pops = if n3 == 0 { vec![n1, n2] } else { vec![n1, n2, n3] };
            let n: usize = pops.iter().sum();
            prop_assume!(k <= n);
            let e = CoefficientTable::exact(&pops, k).unwrap();
            let m = CoefficientTable::mixture(&pops, k).unwrap();
            prop_assert!((e.total() - 1.0).abs() < 1e-12);
            prop_assert!((m.total() - 1.0).abs() < 1e-12);
            prop_assert!(e.weights().iter().chain(m.weights().iter()).all(|&w| w >= 0.0));
        }

        #[test]
        fn mixture_matches_limit_at_exact_fractions(scale in 1usize..200, k in 1usize..6) {
            let pops = [scale, 3 * scale];
            let m = CoefficientTable::mixture(&pops, k).unwrap();
            let l = CoefficientTable::limit(&[0.25, 0.75], k).unwrap();
            for (x, y) in m.entries.iter().zip(&l.entries) {
                prop_assert!((x.1 - y.1).abs() <= 1e-15 * x.1.max(1e-300).max(1.0));
            }
        }
    }
}
