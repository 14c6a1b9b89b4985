//! Residual of the partial sums over the N largest clusters in the H^{-1.1}
//! norm, for one field.
//!
//! cargo run --release --example sobolev_partial_sums -- [level]

use gff_excursions::excursions::{sobolev_norm, SobolevSpec};
use gff_excursions::{Ensemble, Mode};

fn main() -> gff_excursions::Result<()> {
    let level: u32 = std::env::args().nth(1).map_or(6, |s| s.parse().expect("level"));
    let ens = Ensemble::standard(level, 3)?;
    let rep = ens.replica(0);
    let dec = rep.decompose(Mode::Metric);
    let spec = SobolevSpec::covering(ens.domain(), 1.1)?;

    println!("{} clusters; |phi| = {:.5}", dec.len(), sobolev_norm(&rep.field, &spec)?.sqrt());
    let mut n = 0;
    loop {
        let rest = rep.field.sub(&dec.partial_sum(&rep.field, n)?)?;
        println!("N = {n:>5}: residual {:.5}", sobolev_norm(&rest, &spec)?.sqrt());
        if n >= dec.len() {
            break;
        }
        n = if n == 0 { 1 } else { (2 * n).min(dec.len()) };
    }
    Ok(())
}
