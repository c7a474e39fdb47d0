//! Phase-averaged marginals by uniform quadrature over the torus of phases.

use nalgebra::{DMatrix, DVector};

use crate::fock::spec::unit_vector;
use crate::fock::tensor::product_tensor;
use crate::fock::DensityMatrix;
use crate::{Error, Result, C64};

/// Smallest node count per angle at which the trapezoid rule is exact for the
/// `k`-body integrand, whose frequencies are bounded by `k` in each angle.
pub fn min_theta_nodes(k: usize) -> usize {
    2 * k + 2
}

/// Average of `|ψ_θ^{⊗k}⟩⟨ψ_θ^{⊗k}|` with `ψ_θ = Σ_j √n_j e^{−iθ_j} e_j`
/// over `m_theta` uniform nodes per angle, as an operator on `(C^ℓ)^{⊗k}`.
pub fn spin_marginal_quadrature(fractions: &[f64], k: usize, m_theta: usize) -> Result<DensityMatrix> {
    let ell = fractions.len();
    let basis: Vec<DVector<C64>> = (0..ell).map(|j| unit_vector(ell, j)).collect();
    phase_averaged_marginal(&basis, fractions, k, m_theta)
}

/// As [`spin_marginal_quadrature`] with arbitrary orbitals `φ_j` in place of `e_j`.
pub fn phase_averaged_marginal(
    orbitals: &[DVector<C64>],
    fractions: &[f64],
    k: usize,
    m_theta: usize,
) -> Result<DensityMatrix> {
    if orbitals.len() != fractions.len() || orbitals.is_empty() {
        return Err(Error::DimensionMismatch(orbitals.len(), fractions.len()));
    }
    let sum: f64 = fractions.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::FractionsNotNormalized(sum));
    }
    if k == 0 {
        return Err(Error::OrderOutOfRange { k, max: usize::MAX });
    }
    let required = min_theta_nodes(k);
    if m_theta < required {
        return Err(Error::QuadratureOrder { got: m_theta, required });
    }
    let ell = orbitals.len();
    let m = orbitals[0].len();
    let dim = m.pow(k as u32);
    // the integrand is invariant under a global phase, so θ₁ = 0 loses nothing
    let free = ell - 1;
    let nodes = m_theta.pow(free as u32);
    let one = C64::new(1.0, 0.0);
    let mut acc = DMatrix::<C64>::zeros(dim, dim);
    // partial sums over the fastest angle keep the roundoff at O(ℓ·m) terms
    let mut block = DMatrix::<C64>::zeros(dim, dim);
    let mut idx = vec![0usize; free];
    for count in 0..nodes {
        let mut psi = &orbitals[0] * C64::from(fractions[0].sqrt());
        for j in 1..ell {
            let theta = 2.0 * std::f64::consts::PI * idx[j - 1] as f64 / m_theta as f64;
            psi += &orbitals[j] * C64::from_polar(fractions[j].sqrt(), -theta);
        }
        let v = DVector::from_vec(product_tensor(psi.as_slice(), k));
        block.gerc(one, &v, &v, one);
        if free == 0 || (count + 1) % m_theta == 0 {
            acc += &block;
            block.fill(C64::new(0.0, 0.0));
        }
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < m_theta {
                break;
            }
            *slot = 0;
        }
    }
    acc /= C64::new(nodes as f64, 0.0);
    DensityMatrix::new(k, m, acc)
}
