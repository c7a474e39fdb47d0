//! Exact `N`-body marginals against the mode-truncated Hartree flow for
//! `N = 4..12`, three spatial levels, two spin components.

use fragbec_core::hartree::{default_quadrature_order, PotentialSpec};
use fragbec_core::manybody::{convergence_sweep, PropagationOptions, SweepConfig, DEFAULT_SECTOR_CAP};
use fragbec_core::fock::ModeBasis;

fn main() -> fragbec_core::Result<()> {
    let config = SweepConfig {
        basis: ModeBasis::one_dim(3, 2, 1.0)?,
        potential: PotentialSpec::gaussian(1.0, 1.0)?,
        quad_order: default_quadrature_order(3),
        fractions: vec![0.5, 0.5],
        n_list: vec![4, 6, 8, 10, 12],
        k_list: vec![1, 2],
        times: vec![0.25, 0.5, 1.0],
        dt: 1e-3,
        m_theta: 8,
        sector_cap: DEFAULT_SECTOR_CAP,
        propagation: PropagationOptions::default(),
    };
    let start = std::time::Instant::now();
    let result = convergence_sweep(&config)?;
    println!("{:>4} {:>2} {:>5} {:>14} {:>10} {:>10}", "N", "k", "t", "distance", "fact.", "spin");
    for p in &result.points {
        println!(
            "{:>4} {:>2} {:>5} {:>14.6e} {:>10.1e} {:>10.1e}",
            p.n, p.k, p.t, p.distance, p.factorization_residual, p.spin_residual
        );
    }
    for s in &result.series {
        let slope = s.fit.as_ref().map_or(f64::NAN, |f| f.slope);
        println!("k={} t={:<4} slope {slope:+.3} decreasing {}", s.k, s.t, s.strictly_decreasing);
    }
    println!("elapsed {:.1?}", start.elapsed());
    Ok(())
}
