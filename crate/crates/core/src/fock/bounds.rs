//! Inequalities tying condensate deficits to trace distances.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::density::{partial_trace_dense, trace_distance, DensityMatrix};
use super::perturb::perturb_state;
use super::state::ManyBodyState;
use super::tensor::product_tensor;
use crate::{rng, Error, Result, C64};

/// Slack granted to each side of an inequality for roundoff.
pub const BOUND_SLACK: f64 = 1e-12;

/// `W W† / Tr(W W†)` with `W` a `dim × rank` complex Gaussian matrix.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::InvalidParameter(format!("rank {rank} outside 1..={dim}")));
    }
    let w = DMatrix::from_fn(dim, rank, |_, _| rng::complex_normal(rng));
    let m = &w * w.adjoint();
    let tr = m.trace();
    DensityMatrix::new(1, dim, m / tr)
}

/// Both sides of `1 − ⟨φ,γφ⟩ ≤ Tr|γ − |φ⟩⟨φ|| ≤ 2√(1 − ⟨φ,γφ⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sandwich {
    pub deficit: f64,
    pub distance: f64,
    pub upper: f64,
}

impl Sandwich {
    pub fn holds(&self) -> bool {
        self.deficit <= self.distance + BOUND_SLACK && self.distance <= self.upper + BOUND_SLACK
    }
}

pub fn sandwich(gamma: &DensityMatrix, phi: &DVector<C64>) -> Result<Sandwich> {
    if gamma.k() != 1 {
        return Err(Error::OrderOutOfRange { k: gamma.k(), max: 1 });
    }
    let projector = DensityMatrix::pure(1, gamma.local_dim(), phi.as_slice())?;
    let deficit = 1.0 - gamma.expectation(phi.as_slice())?;
    let distance = trace_distance(gamma, &projector)?;
    Ok(Sandwich { deficit, distance, upper: 2.0 * deficit.max(0.0).sqrt() })
}

/// `1 − ⟨φ,γ⁽¹⁾φ⟩ ≤ 1 − ⟨φ^{⊗k},γ⁽ᵏ⁾φ^{⊗k}⟩ ≤ k(1 − ⟨φ,γ⁽¹⁾φ⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KLevel {
    pub k: usize,
    pub one_body_deficit: f64,
    pub k_body_deficit: f64,
}

impl KLevel {
    pub fn holds(&self) -> bool {
        self.one_body_deficit <= self.k_body_deficit + BOUND_SLACK
            && self.k_body_deficit <= self.k as f64 * self.one_body_deficit + BOUND_SLACK
    }
}

pub fn k_level(state: &ManyBodyState, phi: &DVector<C64>, k: usize) -> Result<KLevel> {
    let g1 = partial_trace_dense(state, 1)?;
    let gk = partial_trace_dense(state, k)?;
    Ok(KLevel {
        k,
        one_body_deficit: 1.0 - g1.expectation(phi.as_slice())?,
        k_body_deficit: 1.0 - gk.expectation(&product_tensor(phi.as_slice(), k))?,
    })
}

/// `Tr|γ_Θ⁽ᵏ⁾ − γ_Λ⁽ᵏ⁾|` for `Λ = perturb_state(Θ, eps, seed)`, one entry per
/// `k = 1..=k_max`, next to the bound `2‖Θ − Λ‖`.
pub fn vicinity(state: &ManyBodyState, eps: f64, seed: u64, k_max: usize) -> Result<(Vec<f64>, f64)> {
    let other = perturb_state(state, eps, seed)?;
    let bound = 2.0 * state.distance(&other)?;
    let distances = (1..=k_max)
        .map(|k| trace_distance(&partial_trace_dense(state, k)?, &partial_trace_dense(&other, k)?))
        .collect::<Result<_>>()?;
    Ok((distances, bound))
}
