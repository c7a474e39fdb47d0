//! Closed-form marginals of fragmented condensates checked against brute-force
//! partial traces, and their ranks in the two-component spin representation.

use fragbec_core::fock::spec::unit_vector;
use fragbec_core::fock::{numerical_rank, FragmentationSpec, DEFAULT_RANK_TOL};
use fragbec_core::marginals::{brute_force_marginal, oracle_sweep, MarginalKind};

fn main() -> fragbec_core::Result<()> {
    let start = std::time::Instant::now();
    let cases = oracle_sweep(&[2, 3], 8, 3, 2024)?;
    let worst = cases.iter().max_by(|a, b| a.distance.total_cmp(&b.distance)).expect("non-empty sweep");
    println!(
        "{} comparisons, worst trace distance {:.2e} ({:?}, k = {}, populations {:?}) in {:.1?}",
        cases.len(),
        worst.distance,
        worst.kind,
        worst.k,
        worst.populations,
        start.elapsed()
    );

    let spin = vec![unit_vector(2, 0), unit_vector(2, 1)];
    println!("\n N1 N2  k  rank(exact) rank(mixture) rank(incoherent)");
    for (n1, n2) in [(4, 4), (6, 6), (5, 7), (8, 4)] {
        let spec = FragmentationSpec::from_populations(spin.clone(), vec![n1, n2])?;
        for k in 1..=4 {
            let ranks: Vec<usize> = [MarginalKind::Exact, MarginalKind::Mixture, MarginalKind::Incoherent]
                .iter()
                .map(|&kind| Ok(numerical_rank(&brute_force_marginal(&spec, k, kind)?, DEFAULT_RANK_TOL)))
                .collect::<fragbec_core::Result<_>>()?;
            println!("{n1:>3} {n2:>2} {k:>2} {:>12} {:>13} {:>16}", ranks[0], ranks[1], ranks[2]);
        }
    }
    Ok(())
}
