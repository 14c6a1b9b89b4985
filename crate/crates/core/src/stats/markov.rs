//! Markov property along a path: off the clusters hit by the path, the
//! field is a zero-boundary GFF of the complement.
//!
//! On the metric graph the complement ends where each closed edge leaving a
//! hit cluster first reaches zero. For a complement vertex `u` joined to a
//! hit vertex `c`, that point sits at distance `1 - tau` from `u`, with `tau`
//! the first zero time of the bridge from `c`; it adds conductance
//! `1 / (1 - tau)` to ground in place of the unit edge to `c`.

use std::sync::Arc;

use rand::Rng;

use crate::ensemble::{Ensemble, Stream};
use crate::error::{Error, Result};
use crate::excursions::{Decomposition, Mode};
use crate::lattice::{Field, GreenOperator, LatticeDomain, Site};
use crate::metric::sample_first_zero;

use super::{Estimate, Welford};

/// `length` vertices along the row `j = 0`, starting at the left boundary.
pub fn straight_path(domain: &LatticeDomain, length: usize) -> Result<Vec<usize>> {
    let (origin, width, _) = domain.grid_box();
    let mut path = Vec::with_capacity(length);
    for i in origin.i..origin.i + width as i32 {
        if path.len() == length {
            break;
        }
        if let Some(v) = domain.index_of(Site::new(i, 0)) {
            path.push(v);
        } else if !path.is_empty() {
            break;
        }
    }
    if path.len() < length.max(1) {
        return Err(Error::InvalidPath(format!("no straight path of {length} vertices along j = 0")));
    }
    Ok(path)
}

/// The vertices at `(1/2, 0)` and `(0, 1/2)`.
pub fn default_probes(domain: &LatticeDomain) -> Result<Vec<usize>> {
    let half = 1i32 << (domain.level() - 1);
    [Site::new(half, 0), Site::new(0, half)]
        .into_iter()
        .map(|s| domain.index_of(s).ok_or_else(|| Error::InvalidParameter(format!("probe {s} is not interior"))))
        .collect()
}

/// `G_{D \ gamma}(p, p)` for each probe outside `inside`. With `metric`, edges
/// leaving `gamma` are cut at a sampled first zero; otherwise the Dirichlet
/// condition sits on the vertices of `gamma`.
pub fn complement_green<R: Rng + ?Sized>(
    domain: &Arc<LatticeDomain>,
    field: &Field,
    inside: &[bool],
    probes: &[usize],
    metric: bool,
    rng: &mut R,
) -> Result<Vec<Option<f64>>> {
    let n = domain.num_interior();
    if inside.len() != n || !field.same_domain(domain) {
        return Err(Error::DomainMismatch);
    }
    if inside.iter().all(|&b| b) {
        return Ok(vec![None; probes.len()]);
    }
    let phi = field.values();
    let (sub, map) = domain.restrict(|v| !inside[v])?;
    let mut extra = vec![0.0; map.len()];
    if metric {
        for (k, &u) in map.iter().enumerate() {
            for c in domain.neighbours(u).into_iter().flatten() {
                if inside[c] {
                    let tau = sample_first_zero(phi[c], phi[u], rng)?;
                    extra[k] += 1.0 / (1.0 - tau) - 1.0;
                }
            }
        }
    }
    let green = GreenOperator::with_extra_conductance(Arc::new(sub), &extra)?;
    probes
        .iter()
        .map(|&p| match map.binary_search(&p) {
            Ok(k) => green.green(k, k).map(Some),
            Err(_) => Ok(None),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeReport {
    pub vertex: usize,
    /// Mean of `residual^2 - G_complement(v, v)` with metric-graph cuts.
    pub statistic: Estimate,
    /// Same with the Dirichlet condition on the vertices of `gamma`.
    pub vertex_dirichlet: Estimate,
    /// Samples where the probe lay in `gamma`.
    pub skipped: usize,
}

impl ProbeReport {
    pub fn z(&self) -> f64 {
        self.statistic.z()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovReport {
    pub probes: Vec<ProbeReport>,
    pub samples: usize,
    /// Mean number of clusters hit by the path.
    pub mean_hits: f64,
}

impl MarkovReport {
    pub fn passed(&self) -> bool {
        self.probes.iter().all(|p| p.statistic.count >= 2 && p.z().abs() <= 3.0)
    }
}

pub fn markov_check(ensemble: &Ensemble, path: &[usize], probes: &[usize], samples: usize) -> Result<MarkovReport> {
    if samples < 2 {
        return Err(Error::InvalidParameter("need at least two replicas".into()));
    }
    let domain = ensemble.domain();
    let n = domain.num_interior();
    if let Some(&p) = probes.iter().find(|&&p| p >= n) {
        return Err(Error::IndexOutOfRange { index: p, len: n });
    }
    let mut stats = vec![(Welford::default(), Welford::default(), 0usize); probes.len()];
    let mut hits = 0usize;
    for r in 0..samples as u64 {
        let rep = ensemble.replica(r);
        let dec: Decomposition = rep.decompose(Mode::Metric);
        let hit = dec.clusters_hitting_path(path)?;
        hits += hit.clusters.len();
        let mut rng = ensemble.rng(r, Stream::Bridge);
        let metric = complement_green(domain, &rep.field, &hit.inside, probes, true, &mut rng)?;
        let vertex = complement_green(domain, &rep.field, &hit.inside, probes, false, &mut rng)?;
        let phi = rep.field.values();
        for (k, &p) in probes.iter().enumerate() {
            match (metric[k], vertex[k]) {
                (Some(gm), Some(gv)) => {
                    // off gamma the residual is the field itself
                    let res2 = phi[p] * phi[p];
                    stats[k].0.push(res2 - gm);
                    stats[k].1.push(res2 - gv);
                }
                _ => stats[k].2 += 1,
            }
        }
    }
    Ok(MarkovReport {
        probes: probes
            .iter()
            .zip(stats)
            .map(|(&vertex, (m, v, skipped))| ProbeReport {
                vertex,
                statistic: m.estimate(),
                vertex_dirichlet: v.estimate(),
                skipped,
            })
            .collect(),
        samples,
        mean_hits: hits as f64 / samples as f64,
    })
}
