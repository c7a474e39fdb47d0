//! Least-squares rate fits in log-log coordinates.

use crate::{Error, Result};

pub const MIN_FIT_POINTS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of `log y` about the fitted line.
    pub residual_rms: f64,
}

impl RateFit {
    /// Fitted `y` at `x`.
    pub fn predict(&self, x: f64) -> f64 {
        (self.intercept + self.slope * x.ln()).exp()
    }
}

/// Ordinary least squares of `log y` against `log x`.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints(points.len()));
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::NonPositive(x, y));
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("all abscissae coincide".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_rms =
        (lx.iter().zip(&ly).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / n).sqrt();
    Ok(RateFit { points: points.to_vec(), slope, intercept, residual_rms })
}

/// True when every value is at most its predecessor.
pub fn is_nonincreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] <= w[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<_> = [4.0, 8.0, 16.0, 32.0, 64.0].iter().map(|&n| (n, 1.0 / n)).collect();
        let f = fit_rate(&pts).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-12);
        assert!(f.residual_rms < 1e-12);
    }

    #[test]
    fn constant_series_has_zero_slope() {
        let pts: Vec<_> = (1..6).map(|n| (n as f64, 3.0)).collect();
        assert!(fit_rate(&pts).unwrap().slope.abs() < 1e-14);
    }

    #[test]
    fn subleading_correction() {
        let pts: Vec<_> = (6..=12).map(|e| {
            let n = f64::from(1 << e);
            (n, 1.0 / n + 5.0 / (n * n))
        }).collect();
        let s = fit_rate(&pts).unwrap().slope;
        assert!((-1.02..=-0.98).contains(&s), "{s}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(fit_rate(&[(1.0, 1.0); 3]), Err(Error::TooFewPoints(3))));
        assert!(matches!(fit_rate(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0), (4.0, 1.0)]), Err(Error::NonPositive(..))));
    }
}
