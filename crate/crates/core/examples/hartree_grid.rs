//! Split-step evolution of a displaced Gaussian in the ν-scaled trap with a
//! Gaussian interaction, printing the conserved quantities and the step-size
//! scaling of the energy error.

use fragbec_core::hartree::{evolve_grid, GridGeometry, GridSolver, HartreeField, PotentialSpec, TimeGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridGeometry::new(1, 32.0, 512)?;
    let potential = PotentialSpec::gaussian(1.0, 1.0)?;
    let nu = 1.0;
    let phi0 = HartreeField::displaced_gaussian(&grid, nu, 1.0);

    let mut drifts = Vec::new();
    for dt in [2e-3, 1e-3, 5e-4] {
        let solver = GridSolver::new(&grid, nu, &potential, dt)?;
        let start = solver.diagnostics(&phi0);
        let trajectory = evolve_grid(&phi0, &potential, &TimeGrid::new(1.0, dt, 100)?)?;
        let end = solver.diagnostics(trajectory.last().expect("non-empty"));
        let drift = (end.energy - start.energy).abs();
        println!(
            "dt = {dt:.0e}: energy {:.12} -> {:.12}, drift {drift:.3e}, mass drift {:.1e}",
            start.energy,
            end.energy,
            (end.mass - start.mass).abs()
        );
        drifts.push(drift);
    }
    for w in drifts.windows(2) {
        println!("drift ratio under halving: {:.3}", w[0] / w[1]);
    }

    for nu in [10.0, 20.0, 40.0, 80.0] {
        let phi0 = HartreeField::displaced_gaussian(&grid, nu, 1.0);
        let solver = GridSolver::new(&grid, nu, &potential, 1e-3)?;
        let q0 = solver.diagnostics(&phi0).q_norm;
        let trajectory = evolve_grid(&phi0, &potential, &TimeGrid::new(5.0, 1e-3, 50)?)?;
        let worst = trajectory
            .iter()
            .map(|f| (solver.diagnostics(f).q_norm / q0).powi(2))
            .fold(0.0, f64::max);
        println!("nu = {nu}: sup_t q²(t)/q²(0) = {worst:.6}");
    }
    Ok(())
}
