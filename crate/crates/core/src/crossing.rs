//! Annulus crossing by sign clusters in the square `(-1, 1)^2`.
//!
//! The square contours are fattened to lattice resolution: the crossing lives
//! in `{a - h/2 <= |v| <= b + h/2}` (sup norm) and must join the inner layer
//! `|v| <= a + h/2` to the outer layer `|v| >= b - h/2` through edges of one
//! cluster.

use std::collections::VecDeque;
use std::io::{self, Write};

use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::excursions::{Decomposition, Mode};

/// Two-sided normal quantile for 95% intervals.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusSpec {
    pub a: f64,
    pub b: f64,
}

impl AnnulusSpec {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(0.0 < a && a <= b && b < 1.0) {
            return Err(Error::InvalidParameter(format!("annulus needs 0 < a <= b < 1, got a = {a}, b = {b}")));
        }
        Ok(AnnulusSpec { a, b })
    }
}

/// Does some cluster cross the annulus?
pub fn crosses(dec: &Decomposition, spec: AnnulusSpec) -> Result<bool> {
    let domain = dec.domain();
    if !domain.shape().is_some_and(|s| s.is_standard_square()) {
        return Err(Error::NonStandardDomain);
    }
    let h = domain.mesh();
    // sup norms in lattice units, compared against half-integer offsets
    let lo = spec.a / h - 0.5;
    let inner = spec.a / h + 0.5;
    let outer = spec.b / h - 0.5;
    let hi = spec.b / h + 0.5;
    let max_sup = (1.0 / h).round() - 1.0;
    if outer > max_sup {
        return Err(Error::InvalidParameter(format!(
            "outer contour b = {} lies within h/2 of the boundary at mesh {h}",
            spec.b
        )));
    }
    let n = domain.num_interior();
    let sup = |v: usize| domain.site(v).sup_norm() as f64;
    let in_annulus = |v: usize| {
        let r = sup(v);
        r >= lo && r <= hi && dec.label(v).is_some()
    };
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for v in 0..n {
        if in_annulus(v) && sup(v) <= inner {
            seen[v] = true;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        if sup(v) >= outer {
            return Ok(true);
        }
        let edges = domain.incident_edges(v);
        for (dir, w) in domain.neighbours(v).into_iter().enumerate() {
            if let Some(w) = w {
                if !seen[w] && dec.edge_connects(edges[dir]) && in_annulus(w) {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    Ok(false)
}

/// Monte Carlo crossing frequency with a Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingEstimate {
    pub p_hat: f64,
    pub successes: usize,
    pub samples: usize,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl CrossingEstimate {
    pub fn from_counts(successes: usize, samples: usize) -> Self {
        assert!(samples > 0 && successes <= samples);
        let n = samples as f64;
        let p = successes as f64 / n;
        let z2 = Z95 * Z95;
        let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
        let half = Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        CrossingEstimate {
            p_hat: p,
            successes,
            samples,
            ci_low: (centre - half).max(0.0).min(p),
            ci_high: (centre + half).min(1.0).max(p),
        }
    }

    /// Pool two independent estimates by counts.
    pub fn merge(&self, other: &Self) -> Self {
        Self::from_counts(self.successes + other.successes, self.samples + other.samples)
    }

    /// Binomial standard error `sqrt(p (1 - p) / M)`.
    pub fn se(&self) -> f64 {
        (self.p_hat * (1.0 - self.p_hat) / self.samples as f64).sqrt()
    }
}

/// Crossing frequency over replicas `0..samples` of the ensemble.
pub fn estimate(ensemble: &Ensemble, spec: AnnulusSpec, samples: usize) -> Result<CrossingEstimate> {
    let rows = scan(ensemble, &[spec], samples)?;
    Ok(rows[0])
}

/// One estimate per spec, all evaluated on the same replicas.
pub fn scan(ensemble: &Ensemble, specs: &[AnnulusSpec], samples: usize) -> Result<Vec<CrossingEstimate>> {
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one replica".into()));
    }
    let mut hits = vec![0usize; specs.len()];
    for r in 0..samples as u64 {
        let dec = ensemble.replica(r).decompose(Mode::Metric);
        for (k, &spec) in specs.iter().enumerate() {
            hits[k] += crosses(&dec, spec)? as usize;
        }
    }
    Ok(hits.into_iter().map(|s| CrossingEstimate::from_counts(s, samples)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub n: u32,
    pub spec: AnnulusSpec,
    pub estimate: CrossingEstimate,
    pub seed: u64,
}

/// `p_hat_n(a, b)` over the grid `a_grid x b_grid` (pairs with `a > b` are
/// skipped) for each level in `levels`.
pub fn continuity_scan(
    a_grid: &[f64],
    b_grid: &[f64],
    levels: &[u32],
    samples: usize,
    seed: u64,
) -> Result<Vec<ScanRow>> {
    let mut specs = Vec::new();
    for &a in a_grid {
        for &b in b_grid {
            if a <= b {
                specs.push(AnnulusSpec::new(a, b)?);
            }
        }
    }
    let mut rows = Vec::new();
    for &n in levels {
        let ens = Ensemble::standard(n, seed)?;
        for (spec, estimate) in specs.iter().zip(scan(&ens, &specs, samples)?) {
            rows.push(ScanRow { n, spec: *spec, estimate, seed });
        }
    }
    Ok(rows)
}

/// Largest `|p_hat(a, b) - p_hat(a, b')|` between consecutive `b` values at
/// level `n`.
pub fn max_shift_difference(rows: &[ScanRow], n: u32) -> f64 {
    let mut level: Vec<&ScanRow> = rows.iter().filter(|r| r.n == n).collect();
    level.sort_by(|x, y| x.spec.a.total_cmp(&y.spec.a).then(x.spec.b.total_cmp(&y.spec.b)));
    level
        .windows(2)
        .filter(|w| w[0].spec.a == w[1].spec.a)
        .map(|w| (w[0].estimate.p_hat - w[1].estimate.p_hat).abs())
        .fold(0.0, f64::max)
}

pub const CSV_HEADER: &str = "n,a,b,M,p_hat,ci_low,ci_high,seed0";

pub fn write_csv<W: Write>(out: &mut W, rows: &[ScanRow]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        let e = r.estimate;
        writeln!(out, "{},{},{},{},{},{},{},{}", r.n, r.spec.a, r.spec.b, e.samples, e.p_hat, e.ci_low, e.ci_high, r.seed)?;
    }
    Ok(())
}
