//! Cut one field into metric-graph sign clusters, print the largest ones and
//! check that the signed cluster measures rebuild the field.
//!
//! cargo run --release --example decompose -- [level] [seed]

use gff_excursions::{Ensemble, Mode};

fn main() -> gff_excursions::Result<()> {
    let mut args = std::env::args().skip(1);
    let level: u32 = args.next().map_or(6, |s| s.parse().expect("level"));
    let seed: u64 = args.next().map_or(7, |s| s.parse().expect("seed"));

    let ens = Ensemble::standard(level, seed)?;
    let rep = ens.replica(0);
    for mode in [Mode::Metric, Mode::Discrete] {
        let dec = rep.decompose(mode);
        println!("{mode:?}: {} clusters", dec.len());
        for (k, c) in dec.clusters().iter().take(5).enumerate() {
            println!(
                "  #{:<2} sign {:+} vertices {:>5} diameter {:.3} mass {:.4}",
                k + 1,
                c.sign.value(),
                c.len(),
                c.diameter,
                c.mass
            );
        }
        let rebuilt = dec.reconstruct(&rep.field)?;
        let err = rebuilt.values().iter().zip(rep.field.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!("  reconstruction error {err:e}");
    }
    Ok(())
}
