//! Conditional variance off a path: residual second moment against the Green
//! function of the complement of the clusters the path hits.
//!
//! cargo run --release --example markov_property -- [samples]

use gff_excursions::stats::{default_probes, markov_check, straight_path};
use gff_excursions::Ensemble;

fn main() -> gff_excursions::Result<()> {
    let samples: usize = std::env::args().nth(1).map_or(200, |s| s.parse().expect("samples"));
    let ens = Ensemble::standard(5, 77)?;
    let d = ens.domain();
    let path = straight_path(d, 16)?;
    let report = markov_check(&ens, &path, &default_probes(d)?, samples)?;
    for p in &report.probes {
        println!(
            "probe {}: {:+.4} +- {:.4} (z = {:+.2}); vertex Dirichlet {:+.4}; skipped {}",
            d.site(p.vertex),
            p.statistic.mean,
            p.statistic.se,
            p.z(),
            p.vertex_dirichlet.mean,
            p.skipped
        );
    }
    println!("{:.1} clusters hit per sample; passed: {}", report.mean_hits, report.passed());
    Ok(())
}
