//! The ν-scaled trapped Hartree equation `i∂ₜφ = h_ν φ + (V*|φ|²)φ`.

pub mod diagnostics;
pub mod grid;
pub mod hermite;
pub mod modes;
pub mod potential;
pub mod tensor;

pub use diagnostics::{mode_diagnostics, Diagnostics};
pub use grid::{evolve_grid, GridGeometry, GridSolver, HartreeField};
pub use modes::{evolve_modes, evolve_modes_at, suggested_dt, ModeCoefficients, ModeFlow};
pub use potential::{regularize_potential, PotentialKind, PotentialSpec};
pub use tensor::{default_quadrature_order, interaction_tensor, min_quadrature_order, InteractionTensor};

use crate::{Error, Result};

/// Uniform stepping to `t_final`, recording every `record_every` steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_final: f64,
    pub dt: f64,
    pub record_every: usize,
}

impl TimeGrid {
    pub fn new(t_final: f64, dt: f64, record_every: usize) -> Result<Self> {
        let grid = Self { t_final, dt, record_every };
        grid.steps()?;
        Ok(grid)
    }

    /// Number of steps; `t_final` must be a whole multiple of `dt`.
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt > 0.0) || !(self.t_final >= 0.0) || self.record_every == 0 {
            return Err(Error::InvalidParameter(format!(
                "invalid time grid: T={}, dt={}, record_every={}",
                self.t_final, self.dt, self.record_every
            )));
        }
        let n = (self.t_final / self.dt).round();
        if (n * self.dt - self.t_final).abs() > 1e-9 * self.t_final.max(1.0) {
            return Err(Error::InvalidParameter(format!("T={} is not a multiple of dt={}", self.t_final, self.dt)));
        }
        Ok(n as usize)
    }
}
