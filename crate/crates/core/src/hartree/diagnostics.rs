use super::modes::{density_matrix, ModeCoefficients};
use super::tensor::InteractionTensor;
use crate::C64;

/// Conserved functionals and the Q-norm of a mean-field orbital.
///
/// `energy = (ν/2)∫|∇φ|² + (ν/2)∫(|x|² − D)|φ|² + ½∫(V*|φ|²)|φ|²` and
/// `q_norm² = ∫|φ|² + ∫|∇φ|² + ∫|x|²|φ|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub mass: f64,
    pub energy: f64,
    pub q_norm: f64,
}

/// Diagnostics in the mode basis. Level `n` contributes `ν·n` to the energy
/// and `1 + 2n + D` to `q_norm²`.
pub fn mode_diagnostics(state: &ModeCoefficients, tensor: &InteractionTensor) -> Diagnostics {
    let basis = &state.basis;
    let dim = basis.space_dim() as f64;
    let mut mass = 0.0;
    let mut one_body = 0.0;
    let mut q2 = 0.0;
    for (p, z) in state.c.iter().enumerate() {
        let w = z.norm_sqr();
        let level = basis.spatial_level(basis.spatial_of(p)) as f64;
        mass += w;
        one_body += basis.eigenvalues()[p] * w;
        q2 += (1.0 + 2.0 * level + dim) * w;
    }
    let d = basis.d();
    let rho = density_matrix(&state.c, d, basis.s());
    let mut u = vec![C64::new(0.0, 0.0); d * d];
    tensor.contract(&rho, &mut u);
    // ½ Σ_{p,r} U_{pr} ρ_{rp}, with rho[p·d + r] = ρ_{rp}
    let interaction = 0.5 * u.iter().zip(&rho).map(|(a, b)| a * b).sum::<C64>().re;
    Diagnostics { mass, energy: one_body + interaction, q_norm: q2.sqrt() }
}
