//! Exact finite-dimensional many-body states and their reduced density matrices.

pub mod basis;
pub mod bounds;
pub mod density;
pub mod krdm;
pub mod occupation;
pub mod perturb;
pub mod spec;
pub mod state;
pub mod tensor;

pub use basis::ModeBasis;
pub use bounds::{k_level, random_density_matrix, sandwich, vicinity, KLevel, Sandwich};
pub use density::{
    numerical_rank, occupation_spectrum, partial_trace_dense, partial_trace_mixed, reduce_order, trace_distance,
    trace_norm, DensityMatrix, DEFAULT_RANK_TOL,
};
pub use krdm::{krdm_from_fock, krdm_from_sector};
pub use occupation::{from_fock, to_fock, FockSector, FockState, Occupation};
pub use perturb::perturb_state;
pub use spec::FragmentationSpec;
pub use state::{
    build_fragmented_state, build_incoherent_state, build_superposition_state, ManyBodyState, MixedState,
};
