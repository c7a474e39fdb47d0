//! Condensate-deficit inequalities on seeded random instances, and the
//! stability of marginals under norm-small perturbations of the state.

use rand::Rng;

use fragbec_core::fock::spec::unit_vector;
use fragbec_core::fock::{
    build_fragmented_state, from_fock, k_level, random_density_matrix, sandwich, vicinity, FockState, FragmentationSpec,
    ModeBasis,
};
use fragbec_core::rng;

fn main() -> fragbec_core::Result<()> {
    let mut r = rng::seeded(7);
    let mut worst_ratio: f64 = 0.0;
    let mut held = 0;
    for _ in 0..100 {
        let dim = r.random_range(2..=5);
        let rank = r.random_range(1..=dim);
        let gamma = random_density_matrix(&mut r, dim, rank)?;
        let s = sandwich(&gamma, &rng::random_unit_vector(&mut r, dim))?;
        held += usize::from(s.holds());
        worst_ratio = worst_ratio.max(s.distance / s.upper);
    }
    println!("sandwich: {held}/100 hold, largest distance/upper = {worst_ratio:.4}");

    let mut held = 0;
    for _ in 0..100 {
        let n = r.random_range(2..=6);
        let modes = r.random_range(2..=3);
        let k = r.random_range(1..=n);
        let state = from_fock(&FockState::random(&mut r, n, modes)?)?;
        held += usize::from(k_level(&state, &rng::random_unit_vector(&mut r, modes), k)?.holds());
    }
    println!("k-level: {held}/100 hold");

    let spec = FragmentationSpec::from_populations(vec![unit_vector(3, 0), unit_vector(3, 1)], vec![3, 2])?;
    let state = build_fragmented_state(&spec, &ModeBasis::one_dim(3, 1, 1.0)?)?;
    for eps in [0.01, 0.1, 0.5] {
        let (distances, bound) = vicinity(&state, eps, 11, 5)?;
        let top = distances.iter().cloned().fold(0.0, f64::max);
        println!("ε = {eps}: largest marginal distance {top:.4e} ≤ 2ε = {bound:.4e}");
    }
    Ok(())
}
