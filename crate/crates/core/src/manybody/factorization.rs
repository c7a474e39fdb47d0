//! Splitting of many-body marginals into spatial and spin factors.

use crate::fock::tensor::{interleave, trace_out_space, trace_out_spin};
use crate::fock::{trace_norm, DensityMatrix};
use crate::{Error, Result};

/// The spatial and spin factors of a `k`-body marginal on `(C^{d·s})^{⊗k}`.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub spatial: DensityMatrix,
    pub spin: DensityMatrix,
    /// `Tr|γ − γ_spat ⊗ γ_spin|`.
    pub residual: f64,
}

/// Traces spin and space out of `gamma` and measures how far `gamma` is from
/// the tensor product of the two factors.
pub fn factorize(gamma: &DensityMatrix, d: usize, s: usize) -> Result<Factorization> {
    if gamma.local_dim() != d * s {
        return Err(Error::DimensionMismatch(gamma.local_dim(), d * s));
    }
    let k = gamma.k();
    let spatial = DensityMatrix::new(k, d, trace_out_spin(gamma.matrix(), d, s, k)?)?;
    let spin = DensityMatrix::new(k, s, trace_out_space(gamma.matrix(), d, s, k)?)?;
    let product = interleave(spatial.matrix(), spin.matrix(), d, s, k)?;
    let residual = trace_norm(&(gamma.matrix() - product))?;
    Ok(Factorization { spatial, spin, residual })
}

/// Residual of [`factorize`] alone.
pub fn factorization_residual(gamma: &DensityMatrix, d: usize, s: usize) -> Result<f64> {
    if s == 1 {
        return Ok(0.0);
    }
    factorize(gamma, d, s).map(|f| f.residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{krdm_from_fock, FockState};
    use crate::rng;
    use nalgebra::DMatrix;

    #[test]
    fn product_state_factorizes() {
        // one particle per mode index level·s + spin: all in spatial level 0
        let psi = FockState::basis_state(vec![2, 1, 0, 0, 0, 0]);
        let g = krdm_from_fock(&psi, 2).unwrap();
        let f = factorize(&g, 3, 2).unwrap();
        assert!(f.residual < 1e-12);
        assert!((f.spatial.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entangled_state_does_not() {
        let mut r = rng::seeded(4);
        let psi = FockState::random(&mut r, 3, 4).unwrap();
        let g = krdm_from_fock(&psi, 1).unwrap();
        assert!(factorize(&g, 2, 2).unwrap().residual > 1e-3);
    }

    #[test]
    fn no_spin_is_trivial() {
        let g = DensityMatrix::new(1, 2, DMatrix::from_diagonal_element(2, 2, crate::C64::new(0.5, 0.0))).unwrap();
        assert_eq!(factorization_residual(&g, 2, 1).unwrap(), 0.0);
    }
}
