//! Height gap: the mean field value seen from inside outermost clusters.
//!
//! Two statistics are reported.
//!
//! * `statistic`: the vertex-weighted mean of `sigma phi` over the core of the
//!   filled regions (cluster plus holes) of outermost clusters that stay away
//!   from the boundary. The core drops vertices with a lattice neighbour
//!   (including diagonals) outside the filled region. This is the lattice
//!   observable for the jump across the outer boundary of the cluster.
//! * `hole_statistic`: the mean of `-sigma` times the field average over each
//!   hole of an outermost cluster.

use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::excursions::{Decomposition, Mode, Nesting};
use crate::lattice::{Field, Site};

use super::{Estimate, Welford, HEIGHT_GAP};

/// Contributions of one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightGapSample {
    /// `sum sigma phi` over the cores.
    pub core_sum: f64,
    pub core_count: usize,
    /// Qualifying filled regions.
    pub regions: usize,
    /// `-sigma * mean(phi)` for every qualifying hole.
    pub holes: Vec<f64>,
}

pub fn height_gap_sample(dec: &Decomposition, field: &Field, min_vertices: usize) -> Result<HeightGapSample> {
    if !field.same_domain(dec.domain()) {
        return Err(Error::DomainMismatch);
    }
    let domain = dec.domain();
    let phi = field.values();
    let nest = Nesting::new(dec);
    let clusters = dec.clusters();
    let c = clusters.len();

    let mut filled = vec![0usize; c];
    let mut core_sum = vec![0.0; c];
    let mut core_count = vec![0usize; c];
    for v in 0..domain.num_interior() {
        let Some(k) = nest.filled_owner(v) else { continue };
        filled[k] += 1;
        let s = domain.site(v);
        let interior = (-1..=1).all(|di| {
            (-1..=1).all(|dj| {
                domain.index_of(Site::new(s.i + di, s.j + dj)).is_some_and(|w| nest.filled_owner(w) == Some(k))
            })
        });
        if interior {
            core_sum[k] += clusters[k].sign.value() * phi[v];
            core_count[k] += 1;
        }
    }

    let mut out = HeightGapSample { core_sum: 0.0, core_count: 0, regions: 0, holes: Vec::new() };
    for k in 0..c {
        if !nest.is_outermost(k) {
            continue;
        }
        let sigma = clusters[k].sign.value();
        if !nest.touches_boundary(k) && filled[k] >= min_vertices {
            out.regions += 1;
            out.core_sum += core_sum[k];
            out.core_count += core_count[k];
        }
        if filled[k] > clusters[k].len() {
            for hole in nest.holes(k) {
                if hole.len() >= min_vertices {
                    let mean = hole.iter().map(|&v| phi[v]).sum::<f64>() / hole.len() as f64;
                    out.holes.push(-sigma * mean);
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeightGapReport {
    pub mode: Mode,
    pub level: u32,
    /// Pooled core mean of `sigma phi`; s.e. by the delta method for ratios.
    pub statistic: Estimate,
    pub hole_statistic: Estimate,
    pub regions: usize,
    pub holes: usize,
    pub samples: usize,
    /// `2 lambda` in metric mode, `lambda` in discrete mode.
    pub target: f64,
}

impl HeightGapReport {
    pub fn insufficient_holes(&self) -> bool {
        self.holes == 0
    }

    pub fn insufficient_regions(&self) -> bool {
        self.regions == 0
    }

    pub fn relative_error(&self) -> f64 {
        (self.statistic.mean - self.target).abs() / self.target
    }
}

pub fn height_gap_statistic(ensemble: &Ensemble, mode: Mode, min_vertices: usize, samples: usize) -> Result<HeightGapReport> {
    if min_vertices < 4 {
        return Err(Error::InvalidParameter("min_hole_vertices must be at least 4".into()));
    }
    if samples < 2 {
        return Err(Error::InvalidParameter("need at least two replicas".into()));
    }
    let mut per_sample = Vec::with_capacity(samples);
    let mut holes = Welford::default();
    let mut regions = 0;
    for r in 0..samples as u64 {
        let rep = ensemble.replica(r);
        let dec = rep.decompose(mode);
        let s = height_gap_sample(&dec, &rep.field, min_vertices)?;
        regions += s.regions;
        s.holes.iter().for_each(|&x| holes.push(x));
        per_sample.push((s.core_sum, s.core_count as f64));
    }
    let total: f64 = per_sample.iter().map(|p| p.0).sum();
    let count: f64 = per_sample.iter().map(|p| p.1).sum();
    let statistic = if count > 0.0 {
        let ratio = total / count;
        let m = samples as f64;
        let ss: f64 = per_sample.iter().map(|(s, a)| (s - ratio * a).powi(2)).sum();
        Estimate { mean: ratio, se: (ss * m / (m - 1.0)).sqrt() / count, count: count as usize }
    } else {
        Estimate { mean: 0.0, se: 0.0, count: 0 }
    };
    let target = match mode {
        Mode::Metric => HEIGHT_GAP.two_lambda,
        Mode::Discrete => HEIGHT_GAP.lambda,
    };
    Ok(HeightGapReport {
        mode,
        level: ensemble.domain().level(),
        statistic,
        hole_statistic: holes.estimate(),
        regions,
        holes: holes.count(),
        samples,
        target,
    })
}
