//! Annulus crossing probabilities at two levels, with Wilson intervals.
//!
//! cargo run --release --example crossing_scan -- [samples]

use gff_excursions::crossing::{continuity_scan, max_shift_difference, write_csv};

fn main() -> gff_excursions::Result<()> {
    let samples: usize = std::env::args().nth(1).map_or(200, |s| s.parse().expect("samples"));
    let levels = [5, 6];
    let rows = continuity_scan(&[0.2, 0.3], &[0.3, 0.5, 0.7], &levels, samples, 11)?;
    write_csv(&mut std::io::stdout().lock(), &rows)?;
    for n in levels {
        println!("# n = {n}: largest step in b {:.3}", max_shift_difference(&rows, n));
    }
    Ok(())
}
