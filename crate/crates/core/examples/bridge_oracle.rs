//! Brownian-bridge zero avoidance: closed form against simulated skeletons,
//! and the conditional first-zero time.
//!
//! cargo run --release --example bridge_oracle

use gff_excursions::ensemble::stream_rng;
use gff_excursions::metric::{bridge_hit_mc, open_probability, sample_first_zero};
use gff_excursions::Stream;

fn main() -> gff_excursions::Result<()> {
    let mut rng = stream_rng(3, 0, Stream::Bridge);
    for (a, b) in [(0.2, 0.2), (0.5, 1.0), (1.0, 1.5)] {
        let mc = bridge_hit_mc(a, b, 32, 20_000, &mut rng)?;
        println!(
            "a={a} b={b}: avoid {:.4} closed form, {:.4} +- {:.4} simulated",
            open_probability(a, b),
            1.0 - mc.p_hit,
            mc.se
        );
    }
    let m = 10_000;
    let mean: f64 = (0..m).map(|_| sample_first_zero(0.6, -0.4, &mut rng)).sum::<gff_excursions::Result<f64>>()? / m as f64;
    println!("mean first zero of the bridge 0.6 -> -0.4: {mean:.4}");
    Ok(())
}
