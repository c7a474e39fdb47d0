use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    /// `v0·exp(−|x|²/(2·width²))`.
    Gaussian { v0: f64, width: f64 },
    /// Radial profile sampled at increasing `radii` (first entry 0), linearly
    /// interpolated and zero beyond the last radius. Depending on `|x|` only,
    /// the potential is even by construction.
    Tabulated { radii: Vec<f64>, values: Vec<f64> },
    Zero,
}

/// A two-body interaction `V(x − y)`, optionally clipped to `|V| ≤ cap`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub cap: Option<f64>,
}

impl PotentialSpec {
    pub fn gaussian(v0: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) || !v0.is_finite() {
            return Err(Error::InvalidParameter(format!("gaussian needs width > 0, got v0={v0}, width={width}")));
        }
        Ok(Self { kind: PotentialKind::Gaussian { v0, width }, cap: None })
    }

    pub fn tabulated(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.len() != values.len() || radii.len() < 2 {
            return Err(Error::InvalidParameter("tabulated potential needs matching samples, at least two".into()));
        }
        if radii[0] != 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("radii must start at 0 and increase".into()));
        }
        Ok(Self { kind: PotentialKind::Tabulated { radii, values }, cap: None })
    }

    pub fn zero() -> Self {
        Self { kind: PotentialKind::Zero, cap: None }
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            PotentialKind::Zero => true,
            PotentialKind::Gaussian { v0, .. } => *v0 == 0.0,
            PotentialKind::Tabulated { values, .. } => values.iter().all(|&v| v == 0.0),
        }
    }

    /// `V` at distance `r = |x|`.
    pub fn eval_radial(&self, r: f64) -> f64 {
        let r = r.abs();
        let raw = match &self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::Gaussian { v0, width } => v0 * (-r * r / (2.0 * width * width)).exp(),
            PotentialKind::Tabulated { radii, values } => {
                let last = radii.len() - 1;
                if r >= radii[last] {
                    0.0
                } else {
                    let i = radii.partition_point(|&x| x <= r) - 1;
                    let f = (r - radii[i]) / (radii[i + 1] - radii[i]);
                    values[i] * (1.0 - f) + values[i + 1] * f
                }
            }
        };
        match self.cap {
            Some(c) => raw.signum() * raw.abs().min(c),
            None => raw,
        }
    }

    /// `V(x)` for a one-dimensional separation.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_radial(x)
    }

    /// Largest `|V|` over the profile.
    pub fn peak(&self) -> f64 {
        let raw = match &self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::Gaussian { v0, .. } => v0.abs(),
            PotentialKind::Tabulated { values, .. } => values.iter().fold(0.0, |a: f64, v| a.max(v.abs())),
        };
        self.cap.map_or(raw, |c| raw.min(c))
    }
}

/// `sgn(V)·min(|V|, N³)`.
pub fn regularize_potential(potential: &PotentialSpec, n: usize) -> Result<PotentialSpec> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let c = (n as f64).powi(3);
    let cap = potential.cap.map_or(c, |old| old.min(c));
    Ok(PotentialSpec { kind: potential.kind.clone(), cap: Some(cap) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_values() {
        let v = PotentialSpec::gaussian(2.0, 1.0).unwrap();
        assert_eq!(v.eval(0.0), 2.0);
        assert!((v.eval(1.0) - 2.0 * (-0.5f64).exp()).abs() < 1e-15);
        assert_eq!(v.eval(-1.3), v.eval(1.3));
    }

    #[test]
    fn cap_inactive_for_bounded_potential() {
        let v = PotentialSpec::gaussian(1.0, 1.0).unwrap();
        let r = regularize_potential(&v, 2).unwrap();
        for x in [0.0, 0.3, 2.0] {
            assert_eq!(r.eval(x), v.eval(x));
        }
        let rr = regularize_potential(&r, 2).unwrap();
        assert_eq!(rr, r);
    }

    #[test]
    fn tabulated_peak_is_clipped() {
        let v = PotentialSpec::tabulated(vec![0.0, 0.1, 1.0], vec![1e6, 10.0, 0.0]).unwrap();
        let r = regularize_potential(&v, 10).unwrap();
        assert_eq!(r.eval(0.0), 1e3);
        assert_eq!(r.peak(), 1e3);
        assert!((r.eval(0.55) - 5.0).abs() < 1e-12);
        assert_eq!(r.eval(3.0), 0.0);
    }

    #[test]
    fn negative_values_keep_sign() {
        let v = PotentialSpec::gaussian(-50.0, 1.0).unwrap();
        let r = regularize_potential(&v, 2).unwrap();
        assert_eq!(r.eval(0.0), -8.0);
    }
}
