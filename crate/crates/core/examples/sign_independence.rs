//! Signs of the largest clusters behave like fair independent coins; the
//! corrupted variant copies one sign onto another and must be rejected.
//!
//! cargo run --release --example sign_independence -- [samples]

use gff_excursions::stats::sign_independence_test;
use gff_excursions::Ensemble;

fn main() -> gff_excursions::Result<()> {
    let samples: usize = std::env::args().nth(1).map_or(500, |s| s.parse().expect("samples"));
    let ens = Ensemble::standard(5, 21)?;
    for corrupt in [false, true] {
        let r = sign_independence_test(&ens, 6, samples, corrupt)?;
        let worst = r.pair_correlations.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
        println!(
            "corrupt={corrupt}: max |mean| {:.3}, max |corr| {worst:.3}, threshold {:.3}; means {} pairs {} diameters {}",
            r.means.iter().map(|m| m.abs()).fold(0.0, f64::max),
            r.threshold,
            r.means_ok(),
            r.pairs_ok(),
            r.diameters_ok()
        );
    }
    Ok(())
}
