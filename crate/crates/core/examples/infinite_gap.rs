//! Toy model at growing gap: the κ-system phase, the matrix `K(t)`, and the
//! distance between finite-gap and infinite-gap one-body marginals.

use fragbec_core::fock::{numerical_rank, ModeBasis, DEFAULT_RANK_TOL};
use fragbec_core::hartree::{default_quadrature_order, interaction_tensor, suggested_dt, PotentialSpec};
use fragbec_core::infinite_gap::{
    assemble_k, gamma_infinite_gap, gap_distance, kappa_sweep, toy_orbitals, MeanFieldModel, MeanFieldPath, ThetaGrid,
};
use fragbec_core::stats::fit_rate;

fn main() -> fragbec_core::Result<()> {
    let d = 8;
    let fractions = vec![0.5, 0.5];
    let potential = PotentialSpec::gaussian(1.0, 1.0)?;
    let basis = ModeBasis::one_dim(d, 2, 10.0)?;
    let tensor = interaction_tensor(&potential, &basis, default_quadrature_order(d))?;

    let times = [0.0, 0.5, 1.0, 2.0];
    let grid = ThetaGrid::new(4)?;
    let orbitals = toy_orbitals(&basis);
    let trajectories = kappa_sweep(&grid, &orbitals, &basis, &tensor, &fractions, &times, 1e-3)?;
    let g = std::f64::consts::FRAC_1_SQRT_2;
    for (ti, &t) in times.iter().enumerate() {
        let k = assemble_k(&trajectories, &grid, ti)?;
        let phase = trajectories[0].kappa[ti][0] / trajectories[0].kappa[0][0];
        let gamma = gamma_infinite_gap(&k, &orbitals)?;
        println!(
            "t = {t}: κ phase {:+.10}, expected {:+.10}; K = diag({:.6}, {:.6}); rank {}",
            phase.arg(),
            -g * t,
            k.entries[(0, 0)].re,
            k.entries[(1, 1)].re,
            numerical_rank(&gamma, DEFAULT_RANK_TOL)
        );
    }

    let mut points = Vec::new();
    for nu in [10.0, 20.0, 40.0, 80.0, 160.0, 320.0] {
        let basis = basis.with_nu(nu)?;
        let dt = suggested_dt(&basis);
        let model = MeanFieldModel::toy(basis, tensor.clone(), fractions.clone(), 4, dt)?;
        let dist = gap_distance(&model, &[1.0], MeanFieldPath::Factorized, 1e-3)?[0];
        println!("ν = {nu:>5}: distance {dist:.6e}, √ν·distance {:.6e}", nu.sqrt() * dist);
        points.push((nu, dist));
    }
    let fit = fit_rate(&points)?;
    println!("fitted decay exponent {:.3}", fit.slope);
    Ok(())
}
