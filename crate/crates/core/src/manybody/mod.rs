//! Exact `N`-body evolution of the mode-truncated model.

pub mod factorization;
pub mod hamiltonian;
pub mod propagate;
pub mod sweep;

pub use factorization::{factorization_residual, factorize, Factorization};
pub use hamiltonian::{build_hamiltonian, build_hamiltonian_with_cap, HamiltonianSpec, SectorMatrix, DEFAULT_SECTOR_CAP};
pub use propagate::{evolve_exact, PropagationOptions, Propagator};
pub use sweep::{convergence_sweep, initial_occupation, SweepConfig, SweepPoint, SweepResult, SweepSeries};
