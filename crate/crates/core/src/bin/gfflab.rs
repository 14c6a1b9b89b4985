//! `gfflab`: command-line front end of the excursion laboratory.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand as ClapSubcommand};
use gff_excursions::harness::{self, exit, parse_config, ExperimentConfig, StatsTest, Subcommand};
use gff_excursions::DomainShape;

#[derive(Parser)]
#[command(name = "gfflab", version, about = "Monte Carlo experiments on GFF sign excursions")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Experiment configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed (overrides the configuration).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides the configuration).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Refinement level; replaces the level list of the configuration.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(2..=12))]
    n: Option<u32>,
    /// Replicas per level.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    samples: Option<u32>,
}

#[derive(ClapSubcommand)]
enum Command {
    /// Sample fields and summarize them.
    Sample,
    /// Decompose fields into sign clusters.
    Decompose,
    /// Minkowski content against field mass for the largest clusters.
    Minkowski,
    /// Annulus crossing probabilities over the (a, b) grid.
    Crossing,
    /// Rescaled spin field discrepancy.
    Spin,
    /// Statistical checks of the decomposition.
    Stats {
        /// l2-identity, moment-inequality, sign-independence, height-gap or tail-norm.
        test: Option<StatsTest>,
        /// Overwrite the second sign with the first (power check).
        #[arg(long)]
        corrupt: bool,
    },
    /// Markov property along a straight path.
    Markov,
    /// Height gap in metric and discrete mode.
    Conjecture,
}

fn load(global: &Global) -> gff_excursions::Result<ExperimentConfig> {
    let mut config = match &global.config {
        Some(path) => parse_config(&std::fs::read_to_string(path)?)?,
        None => ExperimentConfig::with_defaults(DomainShape::standard_square(), 5),
    };
    if let Some(seed) = global.seed {
        config.seed = seed;
    }
    if let Some(out) = &global.out {
        config.out = out.clone();
    }
    if let Some(n) = global.n {
        config.n = n;
        config.n_list = vec![n];
    }
    if let Some(m) = global.samples {
        config.samples = m as usize;
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut config = match load(&cli.global) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("gfflab: {e}");
            return ExitCode::from(harness::error_exit_code(&e) as u8);
        }
    };
    let sub = match cli.command {
        Command::Sample => Subcommand::Sample,
        Command::Decompose => Subcommand::Decompose,
        Command::Minkowski => Subcommand::Minkowski,
        Command::Crossing => Subcommand::Crossing,
        Command::Spin => Subcommand::Spin,
        Command::Stats { test, corrupt } => {
            if let Some(t) = test {
                config.test = t;
            }
            config.corrupt |= corrupt;
            Subcommand::Stats
        }
        Command::Markov => Subcommand::Markov,
        Command::Conjecture => Subcommand::Conjecture,
    };
    match harness::run(&config, sub) {
        Ok(outcome) => {
            for line in &outcome.manifest.summary {
                println!("{line}");
            }
            for line in &outcome.manifest.failures {
                eprintln!("FAIL {line}");
            }
            println!("wrote {} ({})", config.out.display(), if outcome.passed() { "pass" } else { "fail" });
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("gfflab: {e}");
            let code = harness::error_exit_code(&e);
            debug_assert!(code == exit::CONFIG || code == exit::IO);
            ExitCode::from(code as u8)
        }
    }
}
