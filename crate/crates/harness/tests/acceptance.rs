//! The ten acceptance criteria at their pinned tolerances, run on the default
//! configuration of the experiment each belongs to. One line per criterion.

use fragbec_harness::config::{Experiment, RunConfig};
use fragbec_harness::criteria;
use fragbec_harness::report::Section;

type Criterion = fn(&RunConfig) -> fragbec_harness::Result<Section>;

#[test]
fn acceptance() {
    let suite: [(&str, Experiment, Criterion); 10] = [
        ("C1", Experiment::Verify, criteria::c1_oracle),
        ("C2", Experiment::Verify, criteria::c2_ranks),
        ("C3", Experiment::MarginalRates, criteria::c3_vicinity),
        ("C4", Experiment::MarginalRates, criteria::c4_lemma),
        ("C5", Experiment::Verify, criteria::c5_quadrature),
        ("C6", Experiment::Hartree, criteria::c6_hartree),
        ("C7", Experiment::InfiniteGap, criteria::c7_infinite_gap),
        ("C8", Experiment::NuRates, criteria::c8_nu_rates),
        ("C9", Experiment::MeanfieldRates, criteria::c9_meanfield),
        ("C10", Experiment::Verify, criteria::c10_inequalities),
    ];
    let mut failed = Vec::new();
    for (id, experiment, run) in suite {
        let config = RunConfig::defaults(experiment);
        let line = match run(&config) {
            Ok(section) => {
                let bad: Vec<String> = section
                    .assertions
                    .iter()
                    .filter(|a| !a.passed)
                    .map(|a| format!("{}: {}", a.name, a.detail))
                    .collect();
                let secs = section.wall_seconds.get(id).copied().unwrap_or(f64::NAN);
                if bad.is_empty() {
                    let details: Vec<&str> =
                        section.assertions.iter().filter(|a| a.name != "runtime").map(|a| a.detail.as_str()).collect();
                    format!("PASS {id:<4} ({secs:.1} s) {}", details.join(" | "))
                } else {
                    failed.push(id);
                    format!("FAIL {id:<4} ({secs:.1} s) {}", bad.join(" | "))
                }
            }
            Err(e) => {
                failed.push(id);
                format!("FAIL {id:<4} error: {e}")
            }
        };
        println!("{line}");
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
