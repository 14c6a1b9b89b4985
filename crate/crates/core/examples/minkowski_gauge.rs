//! Minkowski content of the largest cluster against its field mass over a
//! range of radii.
//!
//! cargo run --release --example minkowski_gauge -- [level]

use gff_excursions::minkowski::gauge_ratio;
use gff_excursions::{Ensemble, Mode, TestFunction};

fn main() -> gff_excursions::Result<()> {
    let level: u32 = std::env::args().nth(1).map_or(7, |s| s.parse().expect("level"));
    let ens = Ensemble::standard(level, 3)?;
    let h = ens.domain().mesh();
    let f = TestFunction::One.sample(ens.domain());
    for r in 0..3 {
        let rep = ens.replica(r);
        let dec = rep.decompose(Mode::Metric);
        let largest = &dec.clusters()[0];
        let radii: Vec<f64> = [1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|k| k * h).collect();
        println!("replica {r}: largest cluster diameter {:.3}", largest.diameter);
        for row in gauge_ratio(largest, &rep.field, &radii, &f)? {
            println!("  r = {:>3.0}h  ratio {:.4}  ({:?})", row.r / h, row.ratio, row.resolution);
        }
    }
    Ok(())
}
