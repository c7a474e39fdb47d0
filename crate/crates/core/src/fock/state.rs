//! First-quantized dense many-body states.
//!
//! Amplitudes live on `M^N` entries, slot 0 most significant. This is the
//! brute-force representation; it is capped at [`DEFAULT_STORAGE_CAP`] entries.

use super::basis::ModeBasis;
use super::spec::FragmentationSpec;
use super::tensor::{digits, flat_index, kron_vec, product_tensor, symmetric_product, tensor_dim};
use crate::{Error, Result, C64};

pub const DEFAULT_STORAGE_CAP: usize = 20_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ManyBodyState {
    n: usize,
    local_dim: usize,
    amplitudes: Vec<C64>,
}

impl ManyBodyState {
    pub fn new(n: usize, local_dim: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let expected = tensor_dim(local_dim, n)
            .ok_or(Error::StorageCap { entries: u128::MAX, cap: DEFAULT_STORAGE_CAP })?;
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch(amplitudes.len(), expected));
        }
        Ok(Self { n, local_dim, amplitudes })
    }

    /// `v^{⊗n}`.
    pub fn product(v: &[C64], n: usize) -> Result<Self> {
        check_cap(v.len(), n, DEFAULT_STORAGE_CAP)?;
        Self::new(n, v.len(), product_tensor(v, n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.amplitudes.len() != other.amplitudes.len() {
            return Err(Error::DimensionMismatch(self.amplitudes.len(), other.amplitudes.len()));
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.amplitudes.len() != other.amplitudes.len() {
            return Err(Error::DimensionMismatch(self.amplitudes.len(), other.amplitudes.len()));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Largest change of an amplitude under a transposition of adjacent slots.
    /// Adjacent transpositions generate the symmetric group, so a zero defect
    /// means full permutation symmetry.
    pub fn symmetry_defect(&self) -> f64 {
        let m = self.local_dim;
        let mut worst: f64 = 0.0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let d = digits(i, m, self.n);
            for slot in 0..self.n.saturating_sub(1) {
                if d[slot] == d[slot + 1] {
                    continue;
                }
                let mut e = d.clone();
                e.swap(slot, slot + 1);
                worst = worst.max((a - self.amplitudes[flat_index(&e, m)]).norm());
            }
        }
        worst
    }

    /// Checks unit norm and permutation symmetry at `tol`.
    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        let norm = self.norm();
        if (norm - 1.0).abs() > tol {
            return Err(Error::Invariant(format!("state norm {norm}")));
        }
        let defect = self.symmetry_defect();
        if defect > tol {
            return Err(Error::Invariant(format!("symmetry defect {defect}")));
        }
        Ok(())
    }
}

fn check_cap(local: usize, n: usize, cap: usize) -> Result<usize> {
    match tensor_dim(local, n) {
        Some(t) if t <= cap => Ok(t),
        _ => Err(Error::StorageCap { entries: (local as u128).saturating_pow(n as u32), cap }),
    }
}

fn check_basis(spec: &FragmentationSpec, basis: &ModeBasis) -> Result<()> {
    if spec.one_body_dim() != basis.modes() {
        return Err(Error::DimensionMismatch(spec.one_body_dim(), basis.modes()));
    }
    Ok(())
}

/// `φ₁^{⊗N₁} ∨ ··· ∨ φ_ℓ^{⊗N_ℓ}`, normalized.
pub fn build_fragmented_state(spec: &FragmentationSpec, basis: &ModeBasis) -> Result<ManyBodyState> {
    build_fragmented_state_with_cap(spec, basis, DEFAULT_STORAGE_CAP)
}

pub fn build_fragmented_state_with_cap(
    spec: &FragmentationSpec,
    basis: &ModeBasis,
    cap: usize,
) -> Result<ManyBodyState> {
    check_basis(spec, basis)?;
    let pops = spec.populations()?;
    let n: usize = pops.iter().sum();
    check_cap(basis.modes(), n, cap)?;
    let amps = symmetric_product(spec.orbitals(), pops)?;
    ManyBodyState::new(n, basis.modes(), amps)
}

/// `Σ_j √(N_j/N) φ_j^{⊗N}`.
pub fn build_superposition_state(spec: &FragmentationSpec, basis: &ModeBasis) -> Result<ManyBodyState> {
    check_basis(spec, basis)?;
    let pops = spec.populations()?;
    let n: usize = pops.iter().sum();
    let total = check_cap(basis.modes(), n, DEFAULT_STORAGE_CAP)?;
    let mut amps = vec![C64::new(0.0, 0.0); total];
    for (phi, &nj) in spec.orbitals().iter().zip(pops) {
        let w = (nj as f64 / n as f64).sqrt();
        let term = product_tensor(phi.as_slice(), n);
        for (a, t) in amps.iter_mut().zip(term) {
            *a += t * w;
        }
    }
    ManyBodyState::new(n, basis.modes(), amps)
}

/// Convex combination of pure states, kept as its components.
#[derive(Debug, Clone)]
pub struct MixedState {
    components: Vec<(f64, ManyBodyState)>,
}

impl MixedState {
    pub fn new(components: Vec<(f64, ManyBodyState)>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let (n, m) = (first.1.n(), first.1.local_dim());
        if let Some((_, s)) = components.iter().find(|(_, s)| s.n() != n || s.local_dim() != m) {
            return Err(Error::DimensionMismatch(s.amplitudes().len(), first.1.amplitudes().len()));
        }
        let total: f64 = components.iter().map(|(w, _)| *w).sum();
        if (total - 1.0).abs() > 1e-12 || components.iter().any(|(w, _)| *w < 0.0) {
            return Err(Error::FractionsNotNormalized(total));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[(f64, ManyBodyState)] {
        &self.components
    }

    pub fn n(&self) -> usize {
        self.components[0].1.n()
    }

    pub fn local_dim(&self) -> usize {
        self.components[0].1.local_dim()
    }
}

/// The incoherent mixture `Σ (N_j/N) |φ_j^{⊗N}⟩⟨φ_j^{⊗N}|`.
pub fn build_incoherent_state(spec: &FragmentationSpec, basis: &ModeBasis) -> Result<MixedState> {
    check_basis(spec, basis)?;
    let pops = spec.populations()?;
    let n: usize = pops.iter().sum();
    check_cap(basis.modes(), n, DEFAULT_STORAGE_CAP)?;
    let comps = spec
        .orbitals()
        .iter()
        .zip(pops)
        .map(|(phi, &nj)| Ok((nj as f64 / n as f64, ManyBodyState::product(phi.as_slice(), n)?)))
        .collect::<Result<Vec<_>>>()?;
    MixedState::new(comps)
}

/// `a ⊗ b` for states of `n_a` and `n_b` particles; not symmetrized.
pub fn tensor_states(a: &ManyBodyState, b: &ManyBodyState) -> Result<ManyBodyState> {
    if a.local_dim() != b.local_dim() {
        return Err(Error::DimensionMismatch(a.local_dim(), b.local_dim()));
    }
    check_cap(a.local_dim(), a.n() + b.n(), DEFAULT_STORAGE_CAP)?;
    ManyBodyState::new(a.n() + b.n(), a.local_dim(), kron_vec(a.amplitudes(), b.amplitudes()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::spec::unit_vector;

    fn two_mode_spec(n1: usize, n2: usize) -> (FragmentationSpec, ModeBasis) {
        let basis = ModeBasis::one_dim(2, 1, 1.0).unwrap();
        let spec = FragmentationSpec::from_modes(&basis, &[0, 1], vec![n1, n2]).unwrap();
        (spec, basis)
    }

    #[test]
    fn pure_product_for_single_level() {
        let basis = ModeBasis::one_dim(3, 1, 1.0).unwrap();
        let spec = FragmentationSpec::from_populations(vec![unit_vector(3, 0)], vec![3]).unwrap();
        let s = build_fragmented_state(&spec, &basis).unwrap();
        assert_eq!(s.amplitudes().len(), 27);
        assert_eq!(s.amplitudes()[0], C64::new(1.0, 0.0));
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_particle_symmetrization() {
        let (spec, basis) = two_mode_spec(1, 1);
        let s = build_fragmented_state(&spec, &basis).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [0.0, h, h, 0.0];
        for (a, e) in s.amplitudes().iter().zip(expect) {
            assert!((a.re - e).abs() < 1e-15);
        }
    }

    #[test]
    fn superposition_has_two_terms() {
        let (spec, basis) = two_mode_spec(2, 2);
        let s = build_superposition_state(&spec, &basis).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0].re - h).abs() < 1e-15);
        assert!((s.amplitudes()[15].re - h).abs() < 1e-15);
        assert!((s.norm() - 1.0).abs() < 1e-14);
        s.check_invariants(1e-12).unwrap();
    }

    #[test]
    fn single_term_superposition_is_product() {
        let basis = ModeBasis::one_dim(2, 1, 1.0).unwrap();
        let spec = FragmentationSpec::from_populations(vec![unit_vector(2, 1)], vec![4]).unwrap();
        let a = build_superposition_state(&spec, &basis).unwrap();
        let b = build_fragmented_state(&spec, &basis).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn storage_cap_is_enforced() {
        let (spec, basis) = two_mode_spec(3, 3);
        let err = build_fragmented_state_with_cap(&spec, &basis, 32).unwrap_err();
        assert!(matches!(err, Error::StorageCap { .. }));
    }
}
