//! Drive the harness from code: parse a configuration, run the crossing scan
//! and print the manifest.
//!
//! cargo run --release --example run_experiment

use gff_excursions::harness::{parse_config, run, Subcommand};

const CONFIG: &str = "\
domain = square(side=2, center=0,0)
n = 5
n_list = 4, 5
samples = 100
seed = 42

[crossing]
a_grid = 0.2, 0.3
b_grid = 0.4, 0.6
";

fn main() -> gff_excursions::Result<()> {
    let mut config = parse_config(CONFIG)?;
    config.out = std::env::temp_dir().join("gfflab-example");
    let outcome = run(&config, Subcommand::Crossing)?;
    print!("{}", outcome.manifest.to_text());
    Ok(())
}
