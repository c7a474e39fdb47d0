//! Brute-force marginals of the fragmented, phase-averaged and incoherent
//! states, built in the full tensor space and traced down.

use rayon::prelude::*;

use super::closed_form::{closed_form_marginal, MarginalKind};
use super::spin_quadrature::min_theta_nodes;
use crate::fock::{
    build_fragmented_state, build_incoherent_state, partial_trace_dense, partial_trace_mixed, trace_distance,
    DensityMatrix, FragmentationSpec, ManyBodyState, MixedState, ModeBasis,
};
use crate::{rng, Error, Result, C64};

/// `γ^{(k)}` of the finite-`N` state behind `kind`, by partial trace.
pub fn brute_force_marginal(spec: &FragmentationSpec, k: usize, kind: MarginalKind) -> Result<DensityMatrix> {
    let basis = ModeBasis::one_dim(spec.one_body_dim(), 1, 1.0)?;
    match kind {
        MarginalKind::Exact => partial_trace_dense(&build_fragmented_state(spec, &basis)?, k),
        MarginalKind::Incoherent => partial_trace_mixed(&build_incoherent_state(spec, &basis)?, k),
        MarginalKind::Mixture => partial_trace_mixed(&phase_averaged_state(spec, min_theta_nodes(k))?, k),
        MarginalKind::Limit => Err(Error::InvalidParameter("the limit marginal has no finite-N state".into())),
    }
}

/// Uniform mixture of `(Σ_j √(N_j/N) e^{−iθ_j} φ_j)^{⊗N}` over `m_theta` phases per orbital.
pub fn phase_averaged_state(spec: &FragmentationSpec, m_theta: usize) -> Result<MixedState> {
    let pops = spec.populations()?;
    let n: usize = pops.iter().sum();
    let ell = spec.ell();
    let count = m_theta.pow(ell as u32);
    let weight = 1.0 / count as f64;
    let comps = (0..count)
        .map(|mut idx| {
            let mut psi = nalgebra::DVector::<C64>::zeros(spec.one_body_dim());
            for (phi, &nj) in spec.orbitals().iter().zip(pops) {
                let theta = 2.0 * std::f64::consts::PI * (idx % m_theta) as f64 / m_theta as f64;
                idx /= m_theta;
                psi += phi * C64::from_polar((nj as f64 / n as f64).sqrt(), -theta);
            }
            Ok((weight, ManyBodyState::product(psi.as_slice(), n)?))
        })
        .collect::<Result<Vec<_>>>()?;
    MixedState::new(comps)
}

/// Every way of writing `n` as an ordered sum of `ell` positive parts.
pub fn compositions(n: usize, ell: usize) -> Vec<Vec<usize>> {
    if ell == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    if ell == 1 {
        return if n >= 1 { vec![vec![n]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..n {
        for mut rest in compositions(n - first, ell - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// One closed-form versus brute-force comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCase {
    pub populations: Vec<usize>,
    pub k: usize,
    pub kind: MarginalKind,
    pub distance: f64,
}

/// Compares the exact, mixture and incoherent closed forms with brute force
/// for every population vector with `ℓ ∈ ell_list`, `N ≤ n_max`, and every
/// `k ≤ min(k_max, N)`. Orbitals are seeded random orthonormal vectors in `C^ℓ`.
pub fn oracle_sweep(ell_list: &[usize], n_max: usize, k_max: usize, seed: u64) -> Result<Vec<OracleCase>> {
    let mut jobs = Vec::new();
    for &ell in ell_list {
        let mut r = rng::seeded(seed ^ ell as u64);
        let orbitals = rng::random_orthonormal(&mut r, ell, ell);
        for n in ell..=n_max {
            for pops in compositions(n, ell) {
                for k in 1..=k_max.min(n) {
                    for kind in [MarginalKind::Exact, MarginalKind::Mixture, MarginalKind::Incoherent] {
                        jobs.push((orbitals.clone(), pops.clone(), k, kind));
                    }
                }
            }
        }
    }
    jobs.into_par_iter()
        .map(|(orbitals, populations, k, kind)| {
            let spec = FragmentationSpec::from_populations(orbitals.clone(), populations.clone())?;
            let closed = closed_form_marginal(&spec, k, kind)?.densify(&orbitals)?;
            let brute = brute_force_marginal(&spec, k, kind)?;
            Ok(OracleCase { populations, k, kind, distance: trace_distance(&closed, &brute)? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(5, 2).len(), 4);
        assert_eq!(compositions(6, 3).len(), 10);
        assert!(compositions(2, 3).is_empty());
    }

    #[test]
    fn small_sweep_agrees() {
        let cases = oracle_sweep(&[2, 3], 5, 2, 7).unwrap();
        let worst = cases.iter().map(|c| c.distance).fold(0.0, f64::max);
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn limit_has_no_brute_force() {
        let spec = FragmentationSpec::from_populations(
            vec![crate::fock::spec::unit_vector(2, 0), crate::fock::spec::unit_vector(2, 1)],
            vec![1, 1],
        )
        .unwrap();
        assert!(brute_force_marginal(&spec, 1, MarginalKind::Limit).is_err());
    }
}
