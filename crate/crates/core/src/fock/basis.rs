use crate::{Error, Result};

/// Truncated one-body space: `d` spatial harmonic-oscillator levels times `s`
/// spinor levels, with the gapped ladder `ε = ν·(level)`.
///
/// Combined mode index `p = level·s + spin`, so the spinor index runs fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeBasis {
    d: usize,
    s: usize,
    nu: f64,
    space_dim: usize,
    spatial_levels: Vec<usize>,
    eigenvalues: Vec<f64>,
}

impl ModeBasis {
    pub fn new(d: usize, s: usize, nu: f64, space_dim: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("d must be at least 1".into()));
        }
        if s == 0 {
            return Err(Error::InvalidParameter("s must be at least 1".into()));
        }
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::InvalidParameter(format!("nu must be positive, got {nu}")));
        }
        let spatial_levels = match space_dim {
            1 => (0..d).collect(),
            3 => oscillator_shells_3d(d),
            other => {
                return Err(Error::InvalidParameter(format!(
                    "space_dim must be 1 or 3, got {other}"
                )))
            }
        };
        let eigenvalues = spatial_levels
            .iter()
            .flat_map(|&n| std::iter::repeat_n(nu * n as f64, s))
            .collect();
        Ok(Self { d, s, nu, space_dim, spatial_levels, eigenvalues })
    }

    /// One-dimensional basis, the default geometry.
    pub fn one_dim(d: usize, s: usize, nu: f64) -> Result<Self> {
        Self::new(d, s, nu, 1)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    /// Total number of one-body modes `d·s`.
    pub fn modes(&self) -> usize {
        self.d * self.s
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn index(&self, spatial: usize, spin: usize) -> usize {
        debug_assert!(spatial < self.d && spin < self.s);
        spatial * self.s + spin
    }

    pub fn spatial_of(&self, p: usize) -> usize {
        p / self.s
    }

    pub fn spin_of(&self, p: usize) -> usize {
        p % self.s
    }

    /// Oscillator quantum number (total shell in 3D) of spatial mode `n`.
    pub fn spatial_level(&self, n: usize) -> usize {
        self.spatial_levels[n]
    }

    /// Gap between the lowest and second-lowest distinct eigenvalue; `None`
    /// when only the ground level is kept.
    pub fn gap(&self) -> Option<f64> {
        let min = self.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        self.eigenvalues
            .iter()
            .cloned()
            .filter(|&e| e > min)
            .fold(None, |acc: Option<f64>, e| Some(acc.map_or(e, |a| a.min(e))))
            .map(|e| e - min)
    }

    /// Same spatial structure with a single spinor level.
    pub fn spatial_only(&self) -> Self {
        Self::new(self.d, 1, self.nu, self.space_dim).expect("validated on construction")
    }

    /// Same geometry at a different gap.
    pub fn with_nu(&self, nu: f64) -> Result<Self> {
        Self::new(self.d, self.s, nu, self.space_dim)
    }
}

/// Shells `nx+ny+nz` of the first `d` Cartesian oscillator states; shell `n`
/// holds `(n+1)(n+2)/2` states.
fn oscillator_shells_3d(d: usize) -> Vec<usize> {
    (0..)
        .flat_map(|shell: usize| std::iter::repeat_n(shell, (shell + 1) * (shell + 2) / 2))
        .take(d)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_is_spin_replicated() {
        let b = ModeBasis::one_dim(3, 2, 5.0).unwrap();
        assert_eq!(b.eigenvalues(), &[0.0, 0.0, 5.0, 5.0, 10.0, 10.0]);
        assert_eq!(b.gap(), Some(5.0));
    }

    #[test]
    fn single_spatial_mode_has_no_gap() {
        let b = ModeBasis::one_dim(1, 2, 7.0).unwrap();
        assert_eq!(b.eigenvalues(), &[0.0, 0.0]);
        assert_eq!(b.gap(), None);
    }

    #[test]
    fn gap_equals_nu() {
        let b = ModeBasis::one_dim(2, 1, 2.0).unwrap();
        assert_eq!(b.eigenvalues()[0], 0.0);
        assert_eq!(b.eigenvalues()[1], 2.0);
        assert_eq!(b.gap(), Some(2.0));
    }

    #[test]
    fn rejects_degenerate_parameters() {
        assert!(ModeBasis::one_dim(0, 1, 1.0).is_err());
        assert!(ModeBasis::one_dim(1, 0, 1.0).is_err());
        assert!(ModeBasis::one_dim(1, 1, 0.0).is_err());
        assert!(ModeBasis::one_dim(1, 1, -3.0).is_err());
        assert!(ModeBasis::new(2, 1, 1.0, 2).is_err());
    }

    #[test]
    fn three_dim_shells_keep_the_gap() {
        let b = ModeBasis::new(5, 1, 3.0, 3).unwrap();
        assert_eq!(b.eigenvalues(), &[0.0, 3.0, 3.0, 3.0, 6.0]);
        assert_eq!(b.gap(), Some(3.0));
    }
}
