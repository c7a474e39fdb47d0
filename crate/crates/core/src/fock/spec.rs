use nalgebra::DVector;

use super::basis::ModeBasis;
use crate::{Error, Result, C64};

pub const ORTHONORMAL_TOL: f64 = 1e-12;
pub const FRACTION_TOL: f64 = 1e-12;

/// Data of an exactly fragmented state `φ₁^{⊗N₁} ∨ ··· ∨ φ_ℓ^{⊗N_ℓ}`:
/// orthonormal orbitals, integer populations and asymptotic fractions.
///
/// Populations are optional so the same type can describe the `N → ∞`
/// limit, which only needs fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct FragmentationSpec {
    orbitals: Vec<DVector<C64>>,
    populations: Option<Vec<usize>>,
    fractions: Vec<f64>,
}

impl FragmentationSpec {
    /// Fractions are taken as `N_j / N`.
    pub fn from_populations(orbitals: Vec<DVector<C64>>, populations: Vec<usize>) -> Result<Self> {
        let n: usize = populations.iter().sum();
        if n == 0 {
            return Err(Error::InvalidParameter("total population must be positive".into()));
        }
        let fractions = populations.iter().map(|&p| p as f64 / n as f64).collect();
        let spec = Self { orbitals, populations: Some(populations), fractions };
        spec.validate()?;
        Ok(spec)
    }

    /// Populations by largest-remainder rounding of `fractions · n`.
    pub fn from_fractions(orbitals: Vec<DVector<C64>>, fractions: Vec<f64>, n: usize) -> Result<Self> {
        check_fractions(&fractions)?;
        let populations = largest_remainder(&fractions, n);
        let spec = Self { orbitals, populations: Some(populations), fractions };
        spec.validate()?;
        Ok(spec)
    }

    /// Fractions only, for the infinite-`N` marginals.
    pub fn limit(orbitals: Vec<DVector<C64>>, fractions: Vec<f64>) -> Result<Self> {
        let spec = Self { orbitals, populations: None, fractions };
        spec.validate()?;
        Ok(spec)
    }

    /// Orbitals taken as the given basis modes.
    pub fn from_modes(basis: &ModeBasis, modes: &[usize], populations: Vec<usize>) -> Result<Self> {
        let orbitals = modes
            .iter()
            .map(|&p| {
                if p >= basis.modes() {
                    Err(Error::IndexOutOfRange(vec![p]))
                } else {
                    Ok(unit_vector(basis.modes(), p))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_populations(orbitals, populations)
    }

    fn validate(&self) -> Result<()> {
        let ell = self.orbitals.len();
        if ell == 0 {
            return Err(Error::InvalidParameter("at least one orbital is required".into()));
        }
        if self.fractions.len() != ell {
            return Err(Error::DimensionMismatch(self.fractions.len(), ell));
        }
        if let Some(p) = &self.populations {
            if p.len() != ell {
                return Err(Error::DimensionMismatch(p.len(), ell));
            }
            if ell >= 2 && p.contains(&0) {
                return Err(Error::InvalidParameter(format!(
                    "every level needs a positive population, got {p:?}"
                )));
            }
        }
        check_fractions(&self.fractions)?;
        if ell >= 2 && self.fractions.iter().any(|&f| !(f > 0.0 && f < 1.0)) {
            return Err(Error::InvalidParameter(format!(
                "fractions must lie in (0,1), got {:?}",
                self.fractions
            )));
        }
        let dim = self.orbitals[0].len();
        if let Some(o) = self.orbitals.iter().find(|o| o.len() != dim) {
            return Err(Error::DimensionMismatch(o.len(), dim));
        }
        let dev = gram_deviation(&self.orbitals);
        if dev > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal(dev));
        }
        Ok(())
    }

    pub fn ell(&self) -> usize {
        self.orbitals.len()
    }

    pub fn orbitals(&self) -> &[DVector<C64>] {
        &self.orbitals
    }

    pub fn one_body_dim(&self) -> usize {
        self.orbitals[0].len()
    }

    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }

    pub fn populations(&self) -> Result<&[usize]> {
        self.populations
            .as_deref()
            .ok_or_else(|| Error::InvalidParameter("this spec carries fractions only".into()))
    }

    pub fn n(&self) -> Option<usize> {
        self.populations.as_ref().map(|p| p.iter().sum())
    }

    /// `|N_j/N − n_j|` per level, the rounding residue of the populations.
    pub fn population_residues(&self) -> Option<Vec<f64>> {
        let p = self.populations.as_ref()?;
        let n = p.iter().sum::<usize>() as f64;
        Some(p.iter().zip(&self.fractions).map(|(&pj, &fj)| (pj as f64 / n - fj).abs()).collect())
    }
}

fn check_fractions(fractions: &[f64]) -> Result<()> {
    let sum: f64 = fractions.iter().sum();
    if (sum - 1.0).abs() > FRACTION_TOL || fractions.iter().any(|f| !f.is_finite() || *f < 0.0) {
        return Err(Error::FractionsNotNormalized(sum));
    }
    Ok(())
}

pub fn unit_vector(dim: usize, p: usize) -> DVector<C64> {
    let mut v = DVector::zeros(dim);
    v[p] = C64::new(1.0, 0.0);
    v
}

/// Largest entry of `|G − 1|` for the Gram matrix of `vectors`.
pub fn gram_deviation(vectors: &[DVector<C64>]) -> f64 {
    let mut dev: f64 = 0.0;
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate() {
            let g = a.dotc(b);
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((g - C64::new(target, 0.0)).norm());
        }
    }
    dev
}

/// Integer populations summing to `n` from fractions: floors first, then the
/// leftover units go to the largest fractional parts (ties to the lower index).
pub fn largest_remainder(fractions: &[f64], n: usize) -> Vec<usize> {
    let raw: Vec<f64> = fractions.iter().map(|f| f * n as f64).collect();
    let mut pops: Vec<usize> = raw.iter().map(|r| r.floor() as usize).collect();
    let assigned: usize = pops.iter().sum();
    let mut order: Vec<usize> = (0..fractions.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = raw[a] - raw[a].floor();
        let rb = raw[b] - raw[b].floor();
        rb.partial_cmp(&ra).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
    });
    for &j in order.iter().take(n.saturating_sub(assigned)) {
        pops[j] += 1;
    }
    pops
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn largest_remainder_preserves_total() {
        assert_eq!(largest_remainder(&[0.5, 0.5], 5), vec![3, 2]);
        assert_eq!(largest_remainder(&[0.3, 0.7], 10), vec![3, 7]);
        assert_eq!(largest_remainder(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 8), vec![3, 3, 2]);
        for n in 1..50 {
            let p = largest_remainder(&[0.15, 0.35, 0.5], n);
            assert_eq!(p.iter().sum::<usize>(), n);
        }
    }

    #[test]
    fn rejects_non_orthonormal_orbitals() {
        let a = unit_vector(2, 0);
        let b = DVector::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.8, 0.0)]);
        let err = FragmentationSpec::from_populations(vec![a, b], vec![1, 1]).unwrap_err();
        assert!(matches!(err, Error::NotOrthonormal(_)));
    }

    #[test]
    fn rejects_bad_fractions() {
        let o = vec![unit_vector(2, 0), unit_vector(2, 1)];
        assert!(FragmentationSpec::limit(o.clone(), vec![0.5, 0.6]).is_err());
        assert!(FragmentationSpec::limit(o.clone(), vec![1.0, 0.0]).is_err());
        assert!(FragmentationSpec::from_populations(o, vec![3, 0]).is_err());
    }

    #[test]
    fn residues_vanish_for_divisible_n() {
        let o = vec![unit_vector(2, 0), unit_vector(2, 1)];
        let s = FragmentationSpec::from_fractions(o.clone(), vec![0.5, 0.5], 8).unwrap();
        assert_eq!(s.populations().unwrap(), &[4, 4]);
        assert!(s.population_residues().unwrap().iter().all(|&r| r == 0.0));
        let s = FragmentationSpec::from_fractions(o, vec![0.5, 0.5], 5).unwrap();
        for r in s.population_residues().unwrap() {
            assert!((r - 0.1).abs() < 1e-15);
        }
    }
}
