use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::excursions::{evaluate_measure, Mode};

use super::{Estimate, Welford};

/// Deterministic set of cluster ranks (0 = largest diameter).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClusterSet {
    All,
    Ranks(Vec<usize>),
}

impl ClusterSet {
    fn contains(&self, k: usize) -> bool {
        match self {
            ClusterSet::All => true,
            ClusterSet::Ranks(r) => r.contains(&k),
        }
    }
}

/// Per-sample terms `X = (phi, f)`, `Y_k = (nu_k, f)` for `k` in the set,
/// `R = (rest, f)`, and the linear reconstruction gap
/// `|X - sum sigma_k Y_k - R|`.
struct Terms {
    x: f64,
    y: Vec<f64>,
    rest: f64,
    linear_gap: f64,
}

fn terms(ensemble: &Ensemble, f: &[f64], set: &ClusterSet, replica: u64) -> Result<Terms> {
    let rep = ensemble.replica(replica);
    let dec = rep.decompose(Mode::Metric);
    let field = &rep.field;
    let phi = field.values();
    let h2 = ensemble.domain().mesh().powi(2);
    let mut rest_values = phi.to_vec();
    let mut y = Vec::new();
    let mut signed = 0.0;
    for (k, c) in dec.clusters().iter().enumerate() {
        if !set.contains(k) {
            continue;
        }
        let m = evaluate_measure(c, field, f)?;
        signed += c.sign.value() * m;
        y.push(m);
        for &v in &c.vertices {
            rest_values[v] = 0.0;
        }
    }
    let rest = h2 * rest_values.iter().zip(f).map(|(a, b)| a * b).sum::<f64>();
    let x = field.pair(f);
    Ok(Terms { x, y, rest, linear_gap: (x - signed - rest).abs() })
}

fn check_f(ensemble: &Ensemble, f: &[f64]) -> Result<()> {
    if f.len() == ensemble.domain().num_interior() {
        Ok(())
    } else {
        Err(Error::DomainMismatch)
    }
}

/// Both sides of `E[(phi,f)^2] = sum_J E[(nu_k,f)^2] + E[(rest,f)^2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthogonalityReport {
    pub lhs: Estimate,
    pub rhs: Estimate,
    /// Mean and s.e. of the per-sample difference `LHS - RHS`.
    pub difference: Estimate,
    /// `sqrt(se_lhs^2 + se_rhs^2)`.
    pub pooled_se: f64,
    /// Largest per-sample `|(phi,f) - sum_J sigma_k (nu_k,f) - (rest,f)|`.
    pub max_linear_gap: f64,
    pub samples: usize,
}

impl OrthogonalityReport {
    pub fn passed(&self) -> bool {
        self.difference.mean.abs() <= 3.0 * self.pooled_se && self.max_linear_gap <= 1e-10
    }
}

/// Replicas `0..samples`, all clusters in the metric decomposition.
pub fn l2_identity_check(ensemble: &Ensemble, f: &[f64], set: &ClusterSet, samples: usize) -> Result<OrthogonalityReport> {
    if samples < 100 {
        return Err(Error::InvalidParameter("the L2 identity check needs at least 100 replicas".into()));
    }
    check_f(ensemble, f)?;
    let (mut l, mut r, mut d) = (Welford::default(), Welford::default(), Welford::default());
    let mut gap: f64 = 0.0;
    for i in 0..samples as u64 {
        let t = terms(ensemble, f, set, i)?;
        let lhs = t.x * t.x;
        let rhs = t.y.iter().map(|y| y * y).sum::<f64>() + t.rest * t.rest;
        l.push(lhs);
        r.push(rhs);
        d.push(lhs - rhs);
        gap = gap.max(t.linear_gap);
    }
    let (lhs, rhs) = (l.estimate(), r.estimate());
    Ok(OrthogonalityReport {
        lhs,
        rhs,
        difference: d.estimate(),
        pooled_se: lhs.se.hypot(rhs.se),
        max_linear_gap: gap,
        samples,
    })
}

/// Both sides of `E[(phi,f)^{2q}] >= sum_J E[(nu_k,f)^{2q}] + E[(rest,f)^{2q}]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub q: u32,
    pub lhs: Estimate,
    pub rhs: Estimate,
    pub pooled_se: f64,
}

impl MomentReport {
    pub fn passed(&self) -> bool {
        self.lhs.mean >= self.rhs.mean - 3.0 * self.pooled_se
    }
}

pub fn moment_inequality_check(
    ensemble: &Ensemble,
    f: &[f64],
    set: &ClusterSet,
    q: u32,
    samples: usize,
) -> Result<MomentReport> {
    if q == 0 {
        return Err(Error::InvalidParameter("moment order q must be at least 1".into()));
    }
    if samples < 2 {
        return Err(Error::InvalidParameter("need at least two replicas".into()));
    }
    check_f(ensemble, f)?;
    let p = 2 * q as i32;
    let (mut l, mut r) = (Welford::default(), Welford::default());
    for i in 0..samples as u64 {
        let t = terms(ensemble, f, set, i)?;
        l.push(t.x.powi(p));
        r.push(t.y.iter().map(|y| y.powi(p)).sum::<f64>() + t.rest.powi(p));
    }
    let (lhs, rhs) = (l.estimate(), r.estimate());
    Ok(MomentReport { q, lhs, rhs, pooled_se: lhs.se.hypot(rhs.se) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_clusters_is_exact_reconstruction() {
        let ens = Ensemble::standard(4, 2).unwrap();
        let f = vec![1.0; ens.domain().num_interior()];
        let rep = l2_identity_check(&ens, &f, &ClusterSet::All, 100).unwrap();
        assert!(rep.max_linear_gap <= 1e-12);
        assert!(rep.passed());
    }

    #[test]
    fn empty_set_is_trivial() {
        let ens = Ensemble::standard(3, 2).unwrap();
        let f = vec![1.0; ens.domain().num_interior()];
        let rep = l2_identity_check(&ens, &f, &ClusterSet::Ranks(vec![]), 100).unwrap();
        assert!(rep.difference.mean.abs() < 1e-15 && rep.difference.se < 1e-15);
    }

    #[test]
    fn zero_test_function_and_q_one() {
        let ens = Ensemble::standard(3, 2).unwrap();
        let n = ens.domain().num_interior();
        let set = ClusterSet::Ranks(vec![0]);
        let z = moment_inequality_check(&ens, &vec![0.0; n], &set, 2, 50).unwrap();
        assert_eq!((z.lhs.mean, z.rhs.mean), (0.0, 0.0));
        assert!(z.passed());
        let f = vec![1.0; n];
        let m = moment_inequality_check(&ens, &f, &set, 1, 100).unwrap();
        let l = l2_identity_check(&ens, &f, &set, 100).unwrap();
        assert_eq!((m.lhs, m.rhs), (l.lhs, l.rhs));
        assert!(l2_identity_check(&ens, &f, &set, 99).is_err());
        assert!(moment_inequality_check(&ens, &f, &set, 0, 10).is_err());
    }
}
