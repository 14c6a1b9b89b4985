//! Height gap of outermost clusters in metric and discrete mode.
//!
//! cargo run --release --example height_gap -- [level] [samples]

use gff_excursions::stats::{height_gap_statistic, HEIGHT_GAP};
use gff_excursions::{Ensemble, Mode};

fn main() -> gff_excursions::Result<()> {
    let mut args = std::env::args().skip(1);
    let level: u32 = args.next().map_or(6, |s| s.parse().expect("level"));
    let samples: usize = args.next().map_or(200, |s| s.parse().expect("samples"));
    let ens = Ensemble::standard(level, 1000 + level as u64)?;
    for mode in [Mode::Metric, Mode::Discrete] {
        let r = height_gap_statistic(&ens, mode, 16, samples)?;
        println!(
            "{mode:?}: {:.4} +- {:.4} (target {:.4}, {} regions); hole mean {:.4}",
            r.statistic.mean, r.statistic.se, r.target, r.regions, r.hole_statistic.mean
        );
    }
    println!("2 lambda = {:.6}", HEIGHT_GAP.two_lambda);
    Ok(())
}
