use nalgebra::{DMatrix, DVector};

use super::state::{ManyBodyState, MixedState};
use super::tensor::tensor_dim;
use crate::{Error, Result, C64};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// A `k`-body operator over `(C^M)^{⊗k}`, slot 0 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    k: usize,
    local_dim: usize,
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// Shape-checked constructor; the physical invariants are checked by
    /// [`DensityMatrix::check_invariants`].
    pub fn new(k: usize, local_dim: usize, matrix: DMatrix<C64>) -> Result<Self> {
        let dim = tensor_dim(local_dim, k).ok_or_else(|| Error::InvalidParameter("order too large".into()))?;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch(matrix.nrows(), dim));
        }
        Ok(Self { k, local_dim, matrix })
    }

    /// `|v⟩⟨v|`.
    pub fn pure(k: usize, local_dim: usize, v: &[C64]) -> Result<Self> {
        let v = DVector::from_column_slice(v);
        Self::new(k, local_dim, &v * v.adjoint())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().fold(0.0, |a: f64, z| a.max(z.norm()))
    }

    /// Eigenvalues of the Hermitian part, nonincreasing.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = hermitian_part(&self.matrix).symmetric_eigenvalues().iter().cloned().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    /// `⟨v, γ v⟩`, real part.
    pub fn expectation(&self, v: &[C64]) -> Result<f64> {
        if v.len() != self.matrix.nrows() {
            return Err(Error::DimensionMismatch(v.len(), self.matrix.nrows()));
        }
        let v = DVector::from_column_slice(v);
        Ok(v.dotc(&(&self.matrix * &v)).re)
    }

    /// Hermitian to 1e−12, eigenvalues ≥ −1e−10, trace 1 ± 1e−10.
    pub fn check_invariants(&self) -> Result<()> {
        let h = self.hermiticity_defect();
        if h > HERMITIAN_TOL {
            return Err(Error::Invariant(format!("hermiticity defect {h:e}")));
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::Invariant(format!("trace {tr}")));
        }
        let min = self.eigenvalues().last().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::Invariant(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// `a ⊗ b` on `(C^M)^{⊗(k_a + k_b)}`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.local_dim != other.local_dim {
            return Err(Error::DimensionMismatch(self.local_dim, other.local_dim));
        }
        Self::new(self.k + other.k, self.local_dim, self.matrix.kronecker(&other.matrix))
    }
}

fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

fn check_order(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::OrderOutOfRange { k, max: n });
    }
    Ok(())
}

/// `γ^{(k)} = Tr_{N−k} |Ψ⟩⟨Ψ|`, computed as `A A†` with `A` the `M^k × M^{N−k}`
/// reshaping of the amplitudes. Normalized by `‖Ψ‖²` only through the input.
pub fn partial_trace_dense(state: &ManyBodyState, k: usize) -> Result<DensityMatrix> {
    check_order(k, state.n())?;
    let m = state.local_dim();
    let rows = m.pow(k as u32);
    let cols = m.pow((state.n() - k) as u32);
    let a = DMatrix::from_row_slice(rows, cols, state.amplitudes());
    DensityMatrix::new(k, m, &a * a.adjoint())
}

/// Partial trace of a mixture, by linearity.
pub fn partial_trace_mixed(state: &MixedState, k: usize) -> Result<DensityMatrix> {
    let m = state.local_dim();
    let mut acc = DMatrix::zeros(m.pow(k as u32), m.pow(k as u32));
    for (w, s) in state.components() {
        acc += partial_trace_dense(s, k)?.into_matrix() * C64::new(*w, 0.0);
    }
    DensityMatrix::new(k, m, acc)
}

/// Traces the trailing `order − k` slots out of an operator of order `order`.
pub fn reduce_order(dm: &DensityMatrix, k: usize) -> Result<DensityMatrix> {
    check_order(k, dm.k())?;
    let m = dm.local_dim();
    let keep = m.pow(k as u32);
    let rest = m.pow((dm.k() - k) as u32);
    let src = dm.matrix();
    let out = DMatrix::from_fn(keep, keep, |i, j| {
        (0..rest).map(|r| src[(i * rest + r, j * rest + r)]).sum()
    });
    DensityMatrix::new(k, m, out)
}

/// `Tr|a − b|`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.k() != b.k() || a.local_dim() != b.local_dim() {
        return Err(Error::DimensionMismatch(a.matrix().nrows(), b.matrix().nrows()));
    }
    trace_norm(&(a.matrix() - b.matrix()))
}

/// Sum of absolute eigenvalues of the Hermitian part of `m`.
pub fn trace_norm(m: &DMatrix<C64>) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
    }
    Ok(hermitian_part(m).symmetric_eigenvalues().iter().map(|l| l.abs()).sum())
}

/// Eigenpairs of a one-body density matrix, largest occupation first.
pub fn occupation_spectrum(dm: &DensityMatrix) -> Result<Vec<(f64, DVector<C64>)>> {
    if dm.k() != 1 {
        return Err(Error::OrderOutOfRange { k: dm.k(), max: 1 });
    }
    let eig = hermitian_part(dm.matrix()).symmetric_eigen();
    let mut pairs: Vec<(f64, DVector<C64>)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, eig.eigenvectors.column(i).into_owned()))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(pairs)
}

/// Number of eigenvalues above `tol` times the largest one.
pub fn numerical_rank(dm: &DensityMatrix, tol: f64) -> usize {
    let ev = dm.eigenvalues();
    let top = ev.first().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return 0;
    }
    ev.iter().filter(|&&l| l > tol * top).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::basis::ModeBasis;
    use crate::fock::spec::{unit_vector, FragmentationSpec};
    use crate::fock::state::{build_fragmented_state, build_superposition_state};
    use crate::fock::tensor::symmetric_product;

    fn xi(n1: usize, n2: usize) -> ManyBodyState {
        let basis = ModeBasis::one_dim(2, 1, 1.0).unwrap();
        let spec = FragmentationSpec::from_modes(&basis, &[0, 1], vec![n1, n2]).unwrap();
        build_fragmented_state(&spec, &basis).unwrap()
    }

    fn frame_weight(dm: &DensityMatrix, counts: &[usize]) -> f64 {
        let o = vec![unit_vector(2, 0), unit_vector(2, 1)];
        dm.expectation(&symmetric_product(&o, counts).unwrap()).unwrap()
    }

    #[test]
    fn product_state_marginal_is_pure() {
        let s = ManyBodyState::product(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)], 4).unwrap();
        for k in 1..=4 {
            let g = partial_trace_dense(&s, k).unwrap();
            g.check_invariants().unwrap();
            assert_eq!(numerical_rank(&g, DEFAULT_RANK_TOL), 1);
        }
    }

    #[test]
    fn xi_one_body_marginal_is_half_half() {
        let g = partial_trace_dense(&xi(2, 2), 1).unwrap();
        assert!((g.matrix()[(0, 0)].re - 0.5).abs() < 1e-14);
        assert!((g.matrix()[(1, 1)].re - 0.5).abs() < 1e-14);
        assert!(g.matrix()[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn xi_two_body_frame_weights() {
        let g = partial_trace_dense(&xi(2, 2), 2).unwrap();
        g.check_invariants().unwrap();
        assert!((frame_weight(&g, &[2, 0]) - 1.0 / 6.0).abs() < 1e-14);
        assert!((frame_weight(&g, &[1, 1]) - 2.0 / 3.0).abs() < 1e-14);
        assert!((frame_weight(&g, &[0, 2]) - 1.0 / 6.0).abs() < 1e-14);
        assert_eq!(numerical_rank(&g, DEFAULT_RANK_TOL), 3);
    }

    #[test]
    fn superposition_two_body_marginal() {
        let basis = ModeBasis::one_dim(2, 1, 1.0).unwrap();
        let spec = FragmentationSpec::from_modes(&basis, &[0, 1], vec![2, 2]).unwrap();
        let g = partial_trace_dense(&build_superposition_state(&spec, &basis).unwrap(), 2).unwrap();
        assert!((g.matrix()[(0, 0)].re - 0.5).abs() < 1e-14);
        assert!((g.matrix()[(3, 3)].re - 0.5).abs() < 1e-14);
        assert!((g.matrix()[(0, 3)]).norm() < 1e-14);
        assert_eq!(numerical_rank(&g, DEFAULT_RANK_TOL), 2);
    }

    #[test]
    fn occupations_of_three_one_split() {
        let g = partial_trace_dense(&xi(3, 1), 1).unwrap();
        let occ = occupation_spectrum(&g).unwrap();
        assert!((occ[0].0 - 0.75).abs() < 1e-14);
        assert!((occ[1].0 - 0.25).abs() < 1e-14);
    }

    #[test]
    fn contraction_matches_direct_marginal() {
        let s = xi(3, 2);
        let g3 = partial_trace_dense(&s, 3).unwrap();
        for k in 1..3 {
            let a = reduce_order(&g3, k).unwrap();
            let b = partial_trace_dense(&s, k).unwrap();
            assert!(trace_distance(&a, &b).unwrap() < 1e-12);
        }
    }

    #[test]
    fn distance_extremes() {
        let a = DensityMatrix::pure(1, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        let b = DensityMatrix::pure(1, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        assert_eq!(trace_distance(&a, &a).unwrap(), 0.0);
        assert!((trace_distance(&a, &b).unwrap() - 2.0).abs() < 1e-14);
        let c = DensityMatrix::pure(2, 2, &[C64::new(1.0, 0.0); 4]).unwrap();
        assert!(trace_distance(&a, &c).is_err());
    }

    #[test]
    fn order_out_of_range() {
        assert!(partial_trace_dense(&xi(1, 1), 0).is_err());
        assert!(partial_trace_dense(&xi(1, 1), 3).is_err());
        assert!(partial_trace_dense(&xi(1, 1), 2).is_ok());
    }
}
