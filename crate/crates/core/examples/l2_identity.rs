//! Orthogonality of the cluster measures: E[(phi,f)^2] against the sum over
//! clusters, for the largest cluster and for all of them.
//!
//! cargo run --release --example l2_identity -- [samples]

use gff_excursions::stats::{l2_identity_check, ClusterSet};
use gff_excursions::{Ensemble, TestFunction};

fn main() -> gff_excursions::Result<()> {
    let samples: usize = std::env::args().nth(1).map_or(400, |s| s.parse().expect("samples"));
    let ens = Ensemble::standard(5, 2)?;
    let f = TestFunction::Bump.sample(ens.domain());
    for set in [ClusterSet::Ranks(vec![0]), ClusterSet::All] {
        let r = l2_identity_check(&ens, &f, &set, samples)?;
        println!(
            "{set:?}: lhs {:.5e} rhs {:.5e} diff {:+.2e} (pooled s.e. {:.2e}), linear gap {:.1e}",
            r.lhs.mean, r.rhs.mean, r.difference.mean, r.pooled_se, r.max_linear_gap
        );
    }
    Ok(())
}
