//! Closed-form marginals of fragmented states, usable at any `N`.

pub mod closed_form;
pub mod coeffs;
pub mod lemma;
pub mod oracle;
pub mod spin_quadrature;

pub use closed_form::{
    closed_form_marginal, exact_mixture_distance, frame_distance, marginal_distance_closed_form, MarginalKind,
    SymmetricFrameMarginal,
};
pub use coeffs::{coeff_exact, coeff_limit, coeff_mixture, multi_indices, CoefficientKind, CoefficientTable};
pub use lemma::{dyadic_grid, lemma_bound_fit, lemma_bound_fit_with, LemmaFit};
pub use oracle::{brute_force_marginal, compositions, oracle_sweep, phase_averaged_state, OracleCase};
pub use spin_quadrature::{min_theta_nodes, phase_averaged_marginal, spin_marginal_quadrature};
