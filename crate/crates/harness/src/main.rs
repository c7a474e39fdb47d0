use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fragbec_harness::{run_and_report, Experiment, HarnessError, RunConfig};

/// Experiments on fragmented Bose–Einstein condensates.
///
/// Exit status: 0 when every assertion passes, 1 when one fails or the run
/// aborts, 2 for an invalid configuration or command line.
#[derive(Parser)]
#[command(name = "fragbec", version)]
struct Cli {
    /// Worker threads for the parallel sweeps; results do not depend on it.
    #[arg(long, env = "FRAGBEC_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML file layered over the experiment's defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory [default: results/<experiment>].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the seed of the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form versus brute-force marginals, ranks, quadrature and inequalities.
    Verify(Common),
    /// Convergence rates in N or in the gap.
    Rates {
        #[arg(long, value_enum)]
        kind: RateKind,
        #[command(flatten)]
        common: Common,
    },
    /// Split-step Hartree solver: conservation, scaling and Q-norm.
    Hartree(Common),
    /// Infinite-gap κ-system of the toy model.
    InfiniteGap(Common),
    /// Exact N-body sweep with factorization diagnostics.
    Manybody(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum RateKind {
    Marginal,
    Nu,
    Meanfield,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let (experiment, common) = match cli.command {
        Command::Verify(c) => (Experiment::Verify, c),
        Command::Rates { kind, common } => (
            match kind {
                RateKind::Marginal => Experiment::MarginalRates,
                RateKind::Nu => Experiment::NuRates,
                RateKind::Meanfield => Experiment::MeanfieldRates,
            },
            common,
        ),
        Command::Hartree(c) => (Experiment::Hartree, c),
        Command::InfiniteGap(c) => (Experiment::InfiniteGap, c),
        Command::Manybody(c) => (Experiment::Manybody, c),
    };
    let mut config = match RunConfig::load(experiment, common.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    let out = common.out.unwrap_or_else(|| PathBuf::from("results").join(experiment.name()));
    match run_and_report(experiment, &config, &out) {
        Ok(summary) => {
            for a in &summary.assertions {
                println!("{} {:<4} {}: {}", if a.passed { "PASS" } else { "FAIL" }, a.criterion, a.name, a.detail);
            }
            println!("report written to {}", out.display());
            if summary.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e @ HarnessError::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
