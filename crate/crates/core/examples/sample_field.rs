//! Sample the zero-boundary GFF on (-1,1)^2 and compare the centre variance
//! with its exact value.
//!
//! cargo run --release --example sample_field -- [level] [samples]

use gff_excursions::Ensemble;

fn main() -> gff_excursions::Result<()> {
    let mut args = std::env::args().skip(1);
    let level: u32 = args.next().map_or(5, |s| s.parse().expect("level"));
    let samples: u64 = args.next().map_or(2000, |s| s.parse().expect("samples"));

    let ens = Ensemble::standard(level, 1)?;
    let domain = ens.domain();
    let centre = domain.index_of(gff_excursions::Site::new(0, 0)).expect("centre vertex");
    let exact = ens.green().diagonal()[centre];

    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for r in 0..samples {
        let x = ens.field(r).values()[centre];
        sum += x;
        sum_sq += x * x;
    }
    let m = samples as f64;
    let var = sum_sq / m - (sum / m).powi(2);
    println!("level {level}: {} interior vertices, mesh {}", domain.num_interior(), domain.mesh());
    println!("centre variance: exact {exact:.5}, empirical {var:.5} over {samples} samples");
    Ok(())
}
