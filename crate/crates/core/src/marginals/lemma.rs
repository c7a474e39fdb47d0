//! Empirical constant in `max_j |c_{k,j} − c̃_{k,j}| ≤ a_k / N`.

use super::coeffs::max_exact_mixture_gap;
use crate::fock::spec::largest_remainder;
use crate::{Error, Result};

pub const MIN_GRID_POINTS: usize = 4;
/// Allowed relative spread of `N·gap` over the top decade of the grid.
pub const STABILIZATION_TOL: f64 = 0.05;
/// Scaled gaps below this are treated as identically zero.
const ZERO_GAP: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaFit {
    pub k: usize,
    /// `(N, N·max_j |c_{k,j} − c̃_{k,j}|)` per grid point.
    pub scaled_gaps: Vec<(usize, f64)>,
    /// Supremum of the scaled gaps over the grid.
    pub a_k: f64,
    /// `(max − min)/max` of the scaled gaps with `N ≥ N_max/10`.
    pub top_decade_spread: f64,
    pub stabilized: bool,
}

/// Fits `a_k` for populations rounded from `fractions` at each grid point.
pub fn lemma_bound_fit(k: usize, fractions: &[f64], n_grid: &[usize]) -> Result<LemmaFit> {
    lemma_bound_fit_with(k, n_grid, |n| max_exact_mixture_gap(&largest_remainder(fractions, n), k))
}

/// Same fit for an arbitrary coefficient-gap function `N ↦ max_j |Δc|`.
pub fn lemma_bound_fit_with(k: usize, n_grid: &[usize], gap: impl Fn(usize) -> Result<f64>) -> Result<LemmaFit> {
    if n_grid.len() < MIN_GRID_POINTS {
        return Err(Error::TooFewPoints(n_grid.len()));
    }
    if let Some(&n) = n_grid.iter().find(|&&n| n < 2 * k) {
        return Err(Error::InvalidParameter(format!("grid point {n} is below 2k = {}", 2 * k)));
    }
    let scaled_gaps = n_grid
        .iter()
        .map(|&n| gap(n).map(|g| (n, n as f64 * g)))
        .collect::<Result<Vec<_>>>()?;
    let a_k = scaled_gaps.iter().map(|p| p.1).fold(0.0, f64::max);
    let n_max = *n_grid.iter().max().expect("grid is non-empty");
    let top: Vec<f64> = scaled_gaps.iter().filter(|p| p.0 * 10 >= n_max).map(|p| p.1).collect();
    let hi = top.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = top.iter().cloned().fold(f64::INFINITY, f64::min);
    let (top_decade_spread, stabilized) = if hi <= ZERO_GAP {
        (0.0, true)
    } else {
        let spread = (hi - lo) / hi;
        (spread, top.len() >= 2 && spread < STABILIZATION_TOL)
    };
    Ok(LemmaFit { k, scaled_gaps, a_k, top_decade_spread, stabilized })
}

/// `{2^lo, …, 2^hi}`.
pub fn dyadic_grid(lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|e| 1usize << e).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_order_gap_vanishes() {
        let f = lemma_bound_fit(1, &[0.5, 0.5], &dyadic_grid(3, 20)).unwrap();
        assert!(f.a_k < 1e-14);
        assert!(f.stabilized);
    }

    #[test]
    fn second_order_plateau() {
        let f = lemma_bound_fit(2, &[0.5, 0.5], &dyadic_grid(3, 20)).unwrap();
        assert!(f.stabilized, "{f:?}");
        // c_{2,1} − c̃_{2,1} = N/(2(N−1)) − 1/2 at an even split, so N·gap → 1/2
        let last = f.scaled_gaps.last().unwrap().1;
        assert!((last - 0.5).abs() < 1e-5);
        for &(_, g) in &f.scaled_gaps {
            assert!(g <= f.a_k);
        }
    }

    #[test]
    fn constant_gap_fails_stabilization() {
        let f = lemma_bound_fit_with(2, &dyadic_grid(3, 20), |_| Ok(0.1)).unwrap();
        assert!(!f.stabilized);
        assert!(f.top_decade_spread > 0.5);
    }

    #[test]
    fn grid_preconditions() {
        assert!(matches!(lemma_bound_fit(2, &[0.5, 0.5], &[8, 16, 32]), Err(Error::TooFewPoints(3))));
        assert!(lemma_bound_fit(3, &[0.5, 0.5], &[4, 8, 16, 32]).is_err());
    }
}
