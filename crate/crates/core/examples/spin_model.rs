//! The rescaled sign field against the GFF: Monte Carlo discrepancy, its
//! closed form, and the arcsine law for sign correlations.
//!
//! cargo run --release --example spin_model

use gff_excursions::spinmodel::{sign_correlation_mc, spin_discrepancy, spin_discrepancy_exact};
use gff_excursions::{ensemble::stream_rng, Ensemble, Stream};

fn main() -> gff_excursions::Result<()> {
    let mut rng = stream_rng(5, 0, Stream::Auxiliary);
    for rho in [0.1, 0.5, 0.9] {
        let c = sign_correlation_mc(rho, 200_000, &mut rng)?;
        println!("rho {rho}: E[sign sign] {:.4} vs (2/pi) arcsin {:.4} (z = {:.2})", c.empirical, c.exact, c.z());
    }
    for level in [3, 4, 5] {
        let ens = Ensemble::standard(level, 40 + level as u64)?;
        let f = vec![1.0; ens.domain().num_interior()];
        let mc = spin_discrepancy(&ens, &f, 1000)?;
        let exact = spin_discrepancy_exact(ens.green(), &f)?;
        println!("n = {level}: discrepancy {:.5} +- {:.5}, closed form {exact:.5}", mc.mean, mc.se);
    }
    Ok(())
}
