//! Metric-graph extension of the discrete field.
//!
//! Along each edge the metric-graph GFF is a Brownian bridge of time-length 1
//! between the endpoint values. Only whether the bridge keeps one sign matters
//! for the sign clusters, so each edge carries a single opening bit drawn with
//! the exact zero-avoidance probability `1 - exp(-2ab)`.

use rand::Rng;
use rand_distr::{Distribution, InverseGaussian, StandardNormal};

use crate::error::{Error, Result};
use crate::lattice::{EdgeEnd, Field};

/// Opening state of one lattice edge given the field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeState {
    pub edge: usize,
    /// True when the bridge over the edge never touches zero.
    pub omega: bool,
    /// Opening probability `1 - exp(-2 J)` (zero across a sign change).
    pub p: f64,
    /// Coupling `J = |phi(a) phi(b)|`.
    pub coupling: f64,
}

/// Probability that a unit-time Brownian bridge from `a` to `b` avoids zero.
pub fn open_probability(a: f64, b: f64) -> f64 {
    let ab = a * b;
    if ab > 0.0 {
        -(-2.0 * ab).exp_m1()
    } else {
        0.0
    }
}

/// Draw the opening bit of every edge. Edges to boundary vertices are closed.
/// One uniform is drawn per interior-interior edge regardless of the field,
/// so the bits are a fixed function of the signs and the stream.
pub fn sample_openings<R: Rng + ?Sized>(field: &Field, rng: &mut R) -> Vec<EdgeState> {
    let phi = field.values();
    field
        .domain()
        .edges()
        .iter()
        .enumerate()
        .map(|(k, e)| match e.b {
            EdgeEnd::Boundary(_) => EdgeState { edge: k, omega: false, p: 0.0, coupling: 0.0 },
            EdgeEnd::Interior(b) => {
                let (x, y) = (phi[e.a], phi[b]);
                let p = open_probability(x, y);
                let u: f64 = rng.random();
                EdgeState { edge: k, omega: u < p, p, coupling: (x * y).abs() }
            }
        })
        .collect()
}

/// Verify the edge-state invariants against `field`.
pub fn check_openings(field: &Field, openings: &[EdgeState]) -> Result<()> {
    let edges = field.domain().edges();
    if openings.len() != edges.len() {
        return Err(Error::DomainMismatch);
    }
    let phi = field.values();
    for (k, (s, e)) in openings.iter().zip(edges).enumerate() {
        if s.edge != k {
            return Err(Error::InvalidEdgeState { edge: k, reason: "edge index out of order" });
        }
        if !s.omega {
            continue;
        }
        match e.b {
            EdgeEnd::Boundary(_) => {
                return Err(Error::InvalidEdgeState { edge: k, reason: "open edge to the boundary" })
            }
            EdgeEnd::Interior(b) => {
                if !(phi[e.a] * phi[b] > 0.0) {
                    return Err(Error::InvalidEdgeState {
                        edge: k,
                        reason: "open edge across a sign change or a zero",
                    });
                }
            }
        }
    }
    Ok(())
}

/// Monte Carlo estimate of a hitting probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeEstimate {
    pub p_hit: f64,
    pub se: f64,
    pub reps: usize,
}

/// Probability that a unit-time Brownian bridge from `a` to `b` hits zero,
/// estimated from exact bridge skeletons on `steps` equal sub-intervals. Each
/// sub-interval contributes its exact avoidance factor
/// `1 - exp(-2 x_i x_{i+1} / dt)`, so the estimator is unbiased for any
/// `steps`.
pub fn bridge_hit_mc<R: Rng + ?Sized>(
    a: f64,
    b: f64,
    steps: usize,
    reps: usize,
    rng: &mut R,
) -> Result<BridgeEstimate> {
    if steps == 0 || reps == 0 {
        return Err(Error::InvalidParameter("bridge_hit_mc needs steps >= 1 and reps >= 1".into()));
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter("bridge endpoints must be finite".into()));
    }
    let dt = 1.0 / steps as f64;
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    for _ in 0..reps {
        let mut x = a;
        let mut survive = 1.0;
        for i in 0..steps {
            let next = if i + 1 == steps {
                b
            } else {
                let remaining = 1.0 - i as f64 * dt;
                let mean = x + (b - x) * dt / remaining;
                let var = dt * (remaining - dt) / remaining;
                mean + var.sqrt() * rng.sample::<f64, _>(StandardNormal)
            };
            let prod = x * next;
            survive *= if prod > 0.0 { -(-2.0 * prod / dt).exp_m1() } else { 0.0 };
            x = next;
        }
        let hit = 1.0 - survive;
        sum += hit;
        sum_sq += hit * hit;
    }
    let n = reps as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    Ok(BridgeEstimate { p_hit: mean, se: (var / n).sqrt(), reps })
}

/// Time in `(0, 1)`, measured from the `a` end, at which a unit-time bridge
/// from `a` to `b` first reaches zero, conditioned on reaching it.
///
/// Writing the bridge as `a(1-t) + bt + (1-t) W(t/(1-t))` turns the question
/// into the first passage of a drifted Brownian motion to `-|a|`, whose law
/// given passage is inverse Gaussian with mean `|a/b|` and shape `a^2`.
pub fn sample_first_zero<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> Result<f64> {
    if a == 0.0 {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter("bridge endpoints must be finite".into()));
    }
    let (a, b) = if a < 0.0 { (-a, -b) } else { (a, b) };
    let s = if b == 0.0 {
        let z: f64 = rng.sample(StandardNormal);
        a * a / (z * z)
    } else {
        let ig = InverseGaussian::new(a / b.abs(), a * a)
            .map_err(|e| Error::InvalidParameter(format!("inverse Gaussian: {e}")))?;
        ig.sample(rng)
    };
    Ok(s / (1.0 + s))
}
