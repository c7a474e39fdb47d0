use nalgebra::DMatrix;

use super::coeffs::{CoefficientKind, CoefficientTable, Provenance};
use crate::fock::tensor::symmetric_product;
use crate::fock::{DensityMatrix, FragmentationSpec};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MarginalKind {
    /// Marginal of the exactly fragmented state.
    Exact,
    /// Phase-averaged coherent state with fractions `N_j/N`.
    Mixture,
    /// `N → ∞` limit with fractions `n_j`.
    Limit,
    /// `Σ (N_j/N) |φ_j^{⊗k}⟩⟨φ_j^{⊗k}|`.
    Incoherent,
}

/// A `k`-body operator diagonal in the frame `{φ₁^{⊗a₁} ∨ ··· ∨ φ_ℓ^{⊗a_ℓ}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricFrameMarginal {
    pub k: usize,
    pub ell: usize,
    pub kind: MarginalKind,
    pub frame: Vec<Vec<usize>>,
    pub weights: CoefficientTable,
    /// Dense block for operators that are not frame-diagonal; `None` for all
    /// closed forms produced here.
    pub off_diagonal: Option<DMatrix<C64>>,
}

impl SymmetricFrameMarginal {
    pub fn weight(&self, a: &[usize]) -> f64 {
        self.weights.weight(a).unwrap_or(0.0)
    }

    /// Number of frame weights above `tol` times the largest one.
    pub fn rank(&self, tol: f64) -> usize {
        let w = self.weights.weights();
        let top = w.iter().cloned().fold(0.0, f64::max);
        w.iter().filter(|&&x| x > tol * top).count()
    }

    /// Dense operator on `(C^M)^{⊗k}` for the given orbitals.
    pub fn densify(&self, orbitals: &[nalgebra::DVector<C64>]) -> Result<DensityMatrix> {
        if orbitals.len() != self.ell {
            return Err(Error::DimensionMismatch(orbitals.len(), self.ell));
        }
        let m = orbitals[0].len();
        let dim = m.pow(self.k as u32);
        let mut out = DMatrix::zeros(dim, dim);
        for (a, w) in &self.weights.entries {
            if *w == 0.0 {
                continue;
            }
            let v = nalgebra::DVector::from_vec(symmetric_product(orbitals, a)?);
            out += &v * v.adjoint() * C64::new(*w, 0.0);
        }
        if let Some(extra) = &self.off_diagonal {
            out += extra;
        }
        DensityMatrix::new(self.k, m, out)
    }
}

pub fn closed_form_marginal(spec: &FragmentationSpec, k: usize, kind: MarginalKind) -> Result<SymmetricFrameMarginal> {
    if k == 0 {
        return Err(Error::OrderOutOfRange { k, max: usize::MAX });
    }
    let ell = spec.ell();
    let weights = match kind {
        MarginalKind::Exact => CoefficientTable::exact(spec.populations()?, k)?,
        MarginalKind::Mixture => CoefficientTable::mixture(spec.populations()?, k)?,
        MarginalKind::Limit => CoefficientTable::limit(spec.fractions(), k)?,
        MarginalKind::Incoherent => {
            let (fractions, provenance) = match spec.populations() {
                Ok(p) => {
                    let n: usize = p.iter().sum();
                    (p.iter().map(|&x| x as f64 / n as f64).collect(), Provenance::Populations(p.to_vec()))
                }
                Err(_) => (spec.fractions().to_vec(), Provenance::Fractions(spec.fractions().to_vec())),
            };
            let entries = (0..ell)
                .map(|j| {
                    let mut a = vec![0; ell];
                    a[j] = k;
                    (a, fractions[j])
                })
                .collect();
            // the weights are not those of a multinomial family; tag them by their source
            let tag = match provenance {
                Provenance::Populations(_) => CoefficientKind::Mixture,
                Provenance::Fractions(_) => CoefficientKind::Limit,
            };
            CoefficientTable { kind: tag, k, entries, provenance }
        }
    };
    let frame = weights.entries.iter().map(|e| e.0.clone()).collect();
    Ok(SymmetricFrameMarginal { k, ell, kind, frame, weights, off_diagonal: None })
}

/// `Σ_a |w_A(a) − w_B(a)|` over the union of both frames.
///
/// Frame vectors are orthonormal, so for frame-diagonal operators this is the
/// exact trace distance.
pub fn frame_distance(a: &SymmetricFrameMarginal, b: &SymmetricFrameMarginal) -> Result<f64> {
    if a.k != b.k || a.ell != b.ell {
        return Err(Error::FrameMismatch(format!("orders ({}, {}) and levels ({}, {})", a.k, b.k, a.ell, b.ell)));
    }
    if a.off_diagonal.is_some() || b.off_diagonal.is_some() {
        return Err(Error::FrameMismatch("operator is not frame-diagonal".into()));
    }
    let mut total = 0.0;
    for (idx, w) in &a.weights.entries {
        total += (w - b.weight(idx)).abs();
    }
    for (idx, w) in &b.weights.entries {
        if a.weights.weight(idx).is_none() {
            total += w.abs();
        }
    }
    Ok(total)
}

pub fn marginal_distance_closed_form(
    spec: &FragmentationSpec,
    k: usize,
    kind_a: MarginalKind,
    kind_b: MarginalKind,
) -> Result<f64> {
    frame_distance(&closed_form_marginal(spec, k, kind_a)?, &closed_form_marginal(spec, k, kind_b)?)
}

/// `distance(exact, mixture)` straight from populations, without building a spec.
pub fn exact_mixture_distance(populations: &[usize], k: usize) -> Result<f64> {
    let e = CoefficientTable::exact(populations, k)?;
    let m = CoefficientTable::mixture(populations, k)?;
    Ok(e.entries.iter().zip(&m.entries).map(|(x, y)| (x.1 - y.1).abs()).sum())
}
