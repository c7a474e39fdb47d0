//! Experiment dispatch: which criteria each subcommand runs.

use std::path::Path;
use std::time::Instant;

use fragbec_core::manybody::convergence_sweep;

use crate::config::{Experiment, RunConfig};
use crate::criteria::{self, budget};
use crate::error::Result;
use crate::report::{emit_report, Section, Summary};

/// Runs `experiment` and returns its assertions and tables.
pub fn run_experiment(experiment: Experiment, cfg: &RunConfig) -> Result<Section> {
    let start = Instant::now();
    let mut section = Section::default();
    match experiment {
        Experiment::Verify => {
            section.extend(criteria::c1_oracle(cfg)?);
            section.extend(criteria::c2_ranks(cfg)?);
            section.extend(criteria::c5_quadrature(cfg)?);
            section.extend(criteria::c10_inequalities(cfg)?);
        }
        Experiment::MarginalRates => {
            section.extend(criteria::c3_vicinity(cfg)?);
            section.extend(criteria::c4_lemma(cfg)?);
        }
        Experiment::NuRates => section.extend(criteria::c8_nu_rates(cfg)?),
        Experiment::MeanfieldRates => section.extend(criteria::c9_meanfield(cfg)?),
        Experiment::Hartree => section.extend(criteria::c6_hartree(cfg)?),
        Experiment::InfiniteGap => section.extend(criteria::c7_infinite_gap(cfg)?),
        Experiment::Manybody => {
            let sweep = convergence_sweep(&criteria::sweep_config(cfg)?)?;
            criteria::c9_rate_checks(cfg, &sweep, &mut section);
            criteria::manybody_checks(&sweep, &mut section);
            let elapsed = start.elapsed().as_secs_f64();
            section.wall_seconds.insert("C9".into(), elapsed);
            section.check("C9", "runtime", elapsed <= budget::C9, format!("{elapsed:.1} s of {} s", budget::C9));
        }
    }
    section.wall_seconds.insert("total".into(), start.elapsed().as_secs_f64());
    Ok(section)
}

/// Runs `experiment` and writes its report into `out`.
pub fn run_and_report(experiment: Experiment, cfg: &RunConfig, out: &Path) -> Result<Summary> {
    let section = run_experiment(experiment, cfg)?;
    emit_report(out, experiment, cfg, &section)
}
