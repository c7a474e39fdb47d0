//! How fast the exact fragmented marginal approaches its phase-averaged
//! counterpart, the coefficient gap behind it, and the phase quadrature of the
//! limiting spin marginal.

use fragbec_core::fock::spec::{largest_remainder, unit_vector};
use fragbec_core::fock::{trace_distance, FragmentationSpec};
use fragbec_core::marginals::{
    closed_form_marginal, dyadic_grid, exact_mixture_distance, lemma_bound_fit, min_theta_nodes,
    spin_marginal_quadrature, MarginalKind,
};
use fragbec_core::stats::fit_rate;

fn main() -> fragbec_core::Result<()> {
    let fractions = [0.3, 0.7];
    let grid = dyadic_grid(3, 20);
    for k in 1..=3 {
        let points: Vec<(f64, f64)> = grid
            .iter()
            .map(|&n| Ok((n as f64, exact_mixture_distance(&largest_remainder(&fractions, n), k)?)))
            .collect::<fragbec_core::Result<_>>()?;
        let largest = points.iter().map(|p| p.1).fold(0.0, f64::max);
        match fit_rate(&points) {
            Ok(fit) => println!("k = {k}: slope {:+.4}, N·distance at 2^20 = {:.4}", fit.slope, points.last().unwrap().1 * (1 << 20) as f64),
            Err(_) => println!("k = {k}: largest distance {largest:.1e}"),
        }
    }

    for k in 1..=4 {
        let fit = lemma_bound_fit(k, &fractions, &grid)?;
        println!("k = {k}: a_k ≈ {:.5}, top-decade spread {:.2e}, stabilized {}", fit.a_k, fit.top_decade_spread, fit.stabilized);
    }

    for ell in [2, 3] {
        let fr: Vec<f64> = (1..=ell).map(|j| j as f64 / (ell * (ell + 1) / 2) as f64).collect();
        let frame: Vec<_> = (0..ell).map(|j| unit_vector(ell, j)).collect();
        let limit = FragmentationSpec::limit(frame.clone(), fr.clone())?;
        for k in 1..=4 {
            let closed = closed_form_marginal(&limit, k, MarginalKind::Limit)?.densify(&frame)?;
            let a = trace_distance(&spin_marginal_quadrature(&fr, k, min_theta_nodes(k))?, &closed)?;
            let b = trace_distance(&spin_marginal_quadrature(&fr, k, 64)?, &closed)?;
            println!("ℓ = {ell}, k = {k}: quadrature error {a:.1e} at 2k+2 nodes, {b:.1e} at 64");
        }
    }
    Ok(())
}
