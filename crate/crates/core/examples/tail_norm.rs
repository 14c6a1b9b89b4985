//! Green-kernel mass of subdomains made of ever smaller components.
//!
//! cargo run --release --example tail_norm

use std::sync::Arc;

use gff_excursions::stats::tail_norm;
use gff_excursions::{DomainShape, GreenOperator, LatticeDomain};

fn main() -> gff_excursions::Result<()> {
    // 16 x 16 interior vertices with mesh 1/16.
    let h = 1.0 / 16.0;
    let shape = DomainShape::square(17.0 * h, (8.5 * h, 8.5 * h))?;
    let domain = Arc::new(LatticeDomain::build(&shape, 4)?);
    let green = GreenOperator::new(domain.clone())?;
    let n = domain.num_interior();
    println!("D: {:.6e}", tail_norm(&green, &vec![true; n])?);
    for s in [16, 8, 4, 2] {
        let mask: Vec<bool> = (0..n)
            .map(|v| {
                let p = domain.site(v);
                p.i % s != 0 && p.j % s != 0
            })
            .collect();
        println!("blocks of side {:>2}: {:.6e}", s - 1, tail_norm(&green, &mask)?);
    }
    println!("empty: {}", tail_norm(&green, &vec![false; n])?);
    Ok(())
}
