//! Negative Sobolev norms in the Dirichlet sine basis of a bounding square.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::{Field, LatticeDomain};

/// `H^{-s}` norm specification: exponent, embedding square and frequency cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevSpec {
    pub exponent: f64,
    /// Lower-left corner.
    pub origin: (f64, f64),
    pub side: f64,
    pub max_frequency: usize,
}

impl SobolevSpec {
    pub fn new(exponent: f64, origin: (f64, f64), side: f64, max_frequency: usize) -> Result<Self> {
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(Error::InvalidParameter(format!("Sobolev exponent must be positive, got {exponent}")));
        }
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::InvalidParameter(format!("embedding square side must be positive, got {side}")));
        }
        if max_frequency == 0 {
            return Err(Error::InvalidParameter("max frequency must be at least 1".into()));
        }
        Ok(SobolevSpec { exponent, origin, side, max_frequency })
    }

    /// Smallest square around the domain's shape, resolved up to the lattice
    /// Nyquist frequency.
    pub fn covering(domain: &LatticeDomain, exponent: f64) -> Result<Self> {
        let h = domain.mesh();
        let (x0, y0, x1, y1) = match domain.shape() {
            Some(s) => s.bounding_box(),
            None => {
                let (o, w, ht) = domain.grid_box();
                let (x0, y0) = (o.i as f64 * h, o.j as f64 * h);
                (x0, y0, x0 + (w - 1) as f64 * h, y0 + (ht - 1) as f64 * h)
            }
        };
        let side = (x1 - x0).max(y1 - y0);
        let k = ((side / h).round() as usize).saturating_sub(1).max(1);
        Self::new(exponent, (x0, y0), side, k)
    }
}

/// `sum_{j,k <= K} (pi^2 (j^2 + k^2) / side^2)^{-s} c_{jk}^2`, with `c_{jk}` the
/// quadrature coefficients of the zero-extended field against the
/// L2-normalized sine basis of the square.
pub fn sobolev_norm(field: &Field, spec: &SobolevSpec) -> Result<f64> {
    let domain = field.domain();
    let h = domain.mesh();
    let (x0, y0) = spec.origin;
    let side = spec.side;
    let tol = 1e-9 * side;
    let sites = domain.interior_vertices();
    let (mut i0, mut j0, mut i1, mut j1) = (i32::MAX, i32::MAX, i32::MIN, i32::MIN);
    for s in sites {
        i0 = i0.min(s.i);
        i1 = i1.max(s.i);
        j0 = j0.min(s.j);
        j1 = j1.max(s.j);
    }
    let inside = |lo: f64, hi: f64, o: f64| lo >= o - tol && hi <= o + side + tol;
    if !(inside(i0 as f64 * h, i1 as f64 * h, x0) && inside(j0 as f64 * h, j1 as f64 * h, y0)) {
        return Err(Error::InvalidParameter("embedding square does not contain the domain".into()));
    }

    let kmax = spec.max_frequency;
    let norm = (2.0 / side).sqrt();
    let table = |lo: i32, hi: i32, o: f64| -> Vec<f64> {
        // table[(c - lo) * kmax + (k - 1)] = e_k(c h)
        let mut t = Vec::with_capacity((hi - lo + 1) as usize * kmax);
        for c in lo..=hi {
            let u = (c as f64 * h - o) / side;
            t.extend((1..=kmax).map(|k| norm * (k as f64 * PI * u).sin()));
        }
        t
    };
    let tx = table(i0, i1, x0);
    let ty = table(j0, j1, y0);
    let rows = (j1 - j0 + 1) as usize;

    // a[row][j] = sum over the row of phi e_j(x)
    let mut a = vec![0.0; rows * kmax];
    for (s, &v) in sites.iter().zip(field.values()) {
        if v == 0.0 {
            continue;
        }
        let r = (s.j - j0) as usize;
        let ex = &tx[(s.i - i0) as usize * kmax..][..kmax];
        for (acc, e) in a[r * kmax..][..kmax].iter_mut().zip(ex) {
            *acc += v * e;
        }
    }
    let mut c = vec![0.0; kmax * kmax];
    for r in 0..rows {
        let ar = &a[r * kmax..][..kmax];
        let ey = &ty[r * kmax..][..kmax];
        for (k, &e) in ey.iter().enumerate() {
            if e == 0.0 {
                continue;
            }
            for (j, &x) in ar.iter().enumerate() {
                c[j * kmax + k] += x * e;
            }
        }
    }
    let scale = PI * PI / (side * side);
    let mut total = 0.0;
    for j in 1..=kmax {
        for k in 1..=kmax {
            let coef = h * h * c[(j - 1) * kmax + (k - 1)];
            total += (scale * (j * j + k * k) as f64).powf(-spec.exponent) * coef * coef;
        }
    }
    Ok(total)
}
