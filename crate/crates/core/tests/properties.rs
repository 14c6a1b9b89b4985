use std::collections::HashSet;
use std::sync::Arc;

use gff_excursions::crossing::{crosses, AnnulusSpec};
use gff_excursions::ensemble::{derive_seed, stream_rng};
use gff_excursions::excursions::{decompose, decompose_discrete, read_raster, write_raster};
use gff_excursions::metric::sample_openings;
use gff_excursions::stats::{height_gap_sample, tail_norm};
use gff_excursions::{Field, GreenOperator, LatticeDomain, Stream};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn domain(level: u32) -> Arc<LatticeDomain> {
    Arc::new(LatticeDomain::standard(level).unwrap())
}

fn random_field(d: &Arc<LatticeDomain>, seed: u64, zeros: bool) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..d.num_interior())
        .map(|_| if zeros && rng.random_bool(0.1) { 0.0 } else { rng.random_range(-2.0..2.0) })
        .collect();
    Field::new(d.clone(), values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reconstruction_is_exact(level in 2u32..5, seed in any::<u64>(), zeros in any::<bool>()) {
        let d = domain(level);
        let f = random_field(&d, seed, zeros);
        let open = sample_openings(&f, &mut ChaCha8Rng::seed_from_u64(seed ^ 1));
        for dec in [decompose(&f, &open).unwrap(), decompose_discrete(&f)] {
            let rebuilt = dec.reconstruct(&f).unwrap();
            prop_assert_eq!(rebuilt.values(), f.values());
            let all = dec.partial_sum(&f, dec.len()).unwrap();
            prop_assert_eq!(all.values(), f.values());
        }
    }

    #[test]
    fn sign_flip_keeps_geometry(level in 2u32..5, seed in any::<u64>()) {
        let d = domain(level);
        let f = random_field(&d, seed, true);
        let g = f.negated();
        let open = sample_openings(&f, &mut ChaCha8Rng::seed_from_u64(seed));
        let open_g = sample_openings(&g, &mut ChaCha8Rng::seed_from_u64(seed));
        let (a, b) = (decompose(&f, &open).unwrap(), decompose(&g, &open_g).unwrap());
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.clusters().iter().zip(b.clusters()) {
            prop_assert_eq!(&x.vertices, &y.vertices);
            prop_assert_eq!(x.sign.value(), -y.sign.value());
            prop_assert_eq!(x.mass, y.mass);
        }
        let (s, t) = (height_gap_sample(&a, &f, 4).unwrap(), height_gap_sample(&b, &g, 4).unwrap());
        prop_assert_eq!(s.core_sum, t.core_sum);
        prop_assert_eq!(s.core_count, t.core_count);
    }

    #[test]
    fn metric_clusters_refine_discrete_ones(level in 2u32..5, seed in any::<u64>()) {
        let d = domain(level);
        let f = random_field(&d, seed, false);
        let open = sample_openings(&f, &mut ChaCha8Rng::seed_from_u64(seed));
        let (metric, discrete) = (decompose(&f, &open).unwrap(), decompose_discrete(&f));
        prop_assert!(metric.len() >= discrete.len());
        for v in 0..d.num_interior() {
            for w in d.neighbours(v).into_iter().flatten() {
                if metric.label(v) == metric.label(w) {
                    prop_assert_eq!(discrete.label(v), discrete.label(w));
                }
            }
        }
    }

    #[test]
    fn crossing_is_monotone(seed in any::<u64>(), a in 0.1f64..0.4, db in 0.0f64..0.3) {
        let d = domain(4);
        let g = GreenOperator::new(d).unwrap();
        let f = g.sample_field(&mut ChaCha8Rng::seed_from_u64(seed));
        let open = sample_openings(&f, &mut ChaCha8Rng::seed_from_u64(!seed));
        let dec = decompose(&f, &open).unwrap();
        prop_assert!(crosses(&dec, AnnulusSpec::new(a, a).unwrap()).unwrap());
        let near = crosses(&dec, AnnulusSpec::new(a, a + db).unwrap()).unwrap();
        let far = crosses(&dec, AnnulusSpec::new(a, a + db + 0.2).unwrap()).unwrap();
        prop_assert!(near || !far);
    }

    #[test]
    fn raster_round_trips(level in 2u32..5, seed in any::<u64>()) {
        let d = domain(level);
        let dec = decompose_discrete(&random_field(&d, seed, true));
        let mut bytes = Vec::new();
        write_raster(&dec, &mut bytes).unwrap();
        let (w, h, max, rows) = read_raster(&bytes[..]).unwrap();
        let sites = d.interior_vertices();
        let i0 = sites.iter().map(|s| s.i).min().unwrap();
        let j0 = sites.iter().map(|s| s.j).min().unwrap();
        let i1 = sites.iter().map(|s| s.i).max().unwrap();
        let j1 = sites.iter().map(|s| s.j).max().unwrap();
        prop_assert_eq!((w, h, max), ((i1 - i0 + 1) as usize, (j1 - j0 + 1) as usize, dec.len()));
        for v in 0..d.num_interior() {
            let s = d.site(v);
            let label = rows[(j1 - s.j) as usize][(s.i - i0) as usize];
            prop_assert_eq!(label, dec.label(v).map_or(0, |k| k + 1));
        }
    }
}

#[test]
fn tail_norm_is_monotone_under_inclusion() {
    let d = domain(3);
    let g = GreenOperator::new(d.clone()).unwrap();
    let n = d.num_interior();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let big: Vec<bool> = (0..n).map(|_| rng.random_bool(0.7)).collect();
        let small: Vec<bool> = big.iter().map(|&b| b && rng.random_bool(0.6)).collect();
        assert!(tail_norm(&g, &small).unwrap() <= tail_norm(&g, &big).unwrap() * (1.0 + 1e-12));
    }
}

#[test]
fn stream_tags_never_collide() {
    let tags = [Stream::Field, Stream::Openings, Stream::Bridge, Stream::Auxiliary];
    for replica in 0..250_000u64 {
        let seeds: HashSet<u64> = tags.iter().map(|&t| derive_seed(17, replica, t)).collect();
        assert_eq!(seeds.len(), tags.len());
    }
}

#[test]
fn replica_streams_are_equidistributed() {
    // Chi-square over 2^16 buckets, first draw of 2^20 replica streams.
    let buckets = 1usize << 16;
    let draws = 1usize << 20;
    let mut counts = vec![0u32; buckets];
    for r in 0..draws as u64 {
        let x: u64 = stream_rng(99, r, Stream::Field).random();
        counts[(x >> 48) as usize] += 1;
    }
    let expected = (draws / buckets) as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dof = (buckets - 1) as f64;
    let z = (chi2 - dof) / (2.0 * dof).sqrt();
    assert!(z.abs() < 5.0, "chi-square {chi2:.0} on {dof} dof (z = {z:.2})");
}
