//! Minkowski content of clusters in the gauge `|log r|^{1/2} r^2`.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::excursions::{evaluate_measure, ExcursionCluster};
use crate::lattice::{Field, LatticeDomain};

/// Euclidean distance from every interior vertex to a cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceGrid {
    mesh: f64,
    // squared distance in lattice units, exact integers
    dist2: Vec<f64>,
}

impl DistanceGrid {
    /// Distance of interior vertex `v`, continuum units.
    pub fn distance(&self, v: usize) -> f64 {
        self.dist2[v].sqrt() * self.mesh
    }

    pub fn distances(&self) -> Vec<f64> {
        self.dist2.iter().map(|d| d.sqrt() * self.mesh).collect()
    }

    pub fn len(&self) -> usize {
        self.dist2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist2.is_empty()
    }

    /// Number of vertices within distance `r`.
    pub fn count_within(&self, r: f64) -> usize {
        let t = self.threshold(r);
        self.dist2.iter().filter(|&&d| d <= t).count()
    }

    fn threshold(&self, r: f64) -> f64 {
        let q = r / self.mesh;
        q * q * (1.0 + 1e-12)
    }
}

// Squared distance to the nearest seed along a line: lower envelope of
// parabolas (Felzenszwalb & Huttenlocher).
fn edt_1d(f: &[f64], out: &mut [f64], v: &mut Vec<usize>, z: &mut Vec<f64>) {
    let n = f.len();
    v.clear();
    z.clear();
    let finite: Vec<usize> = (0..n).filter(|&q| f[q].is_finite()).collect();
    if finite.is_empty() {
        out.iter_mut().for_each(|o| *o = f64::INFINITY);
        return;
    }
    for &q in &finite {
        let qf = q as f64;
        loop {
            match v.last() {
                None => {
                    v.push(q);
                    z.push(f64::NEG_INFINITY);
                    break;
                }
                Some(&p) => {
                    let pf = p as f64;
                    let s = ((f[q] + qf * qf) - (f[p] + pf * pf)) / (2.0 * (qf - pf));
                    if s <= *z.last().expect("paired with v") {
                        v.pop();
                        z.pop();
                    } else {
                        v.push(q);
                        z.push(s);
                        break;
                    }
                }
            }
        }
    }
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        let qf = q as f64;
        while k + 1 < v.len() && z[k + 1] < qf {
            k += 1;
        }
        let d = qf - v[k] as f64;
        *o = d * d + f[v[k]];
    }
}

/// Exact Euclidean distance transform to the cluster's vertex set.
pub fn distance_transform(cluster: &ExcursionCluster, domain: &LatticeDomain) -> Result<DistanceGrid> {
    if cluster.vertices.is_empty() {
        return Err(Error::EmptyCluster);
    }
    let (origin, w, h) = domain.grid_box();
    let n = domain.num_interior();
    let mut grid = vec![f64::INFINITY; w * h];
    for &v in &cluster.vertices {
        if v >= n {
            return Err(Error::IndexOutOfRange { index: v, len: n });
        }
        let s = domain.site(v);
        grid[(s.j - origin.j) as usize * w + (s.i - origin.i) as usize] = 0.0;
    }
    let (mut vs, mut zs) = (Vec::new(), Vec::new());
    let mut line = vec![0.0; w.max(h)];
    let mut col = vec![0.0; h];
    for x in 0..w {
        for y in 0..h {
            col[y] = grid[y * w + x];
        }
        edt_1d(&col, &mut line[..h], &mut vs, &mut zs);
        for y in 0..h {
            grid[y * w + x] = line[y];
        }
    }
    for y in 0..h {
        let row = grid[y * w..(y + 1) * w].to_vec();
        edt_1d(&row, &mut grid[y * w..(y + 1) * w], &mut vs, &mut zs);
    }
    let dist2 = domain
        .interior_vertices()
        .iter()
        .map(|s| grid[(s.j - origin.j) as usize * w + (s.i - origin.i) as usize])
        .collect();
    Ok(DistanceGrid { mesh: domain.mesh(), dist2 })
}

fn gauge(r: f64) -> Result<f64> {
    if r > 0.0 && r < 1.0 {
        Ok(0.5 * (-r.ln()).sqrt())
    } else {
        Err(Error::GaugeUndefined { r })
    }
}

/// `(1/2) |log r|^{1/2} h^2 sum_{d(v) <= r} f(v)`.
pub fn minkowski_measure(grid: &DistanceGrid, r: f64, f: &[f64]) -> Result<f64> {
    let g = gauge(r)?;
    if f.len() != grid.len() {
        return Err(Error::DomainMismatch);
    }
    let t = grid.threshold(r);
    let sum: f64 = grid.dist2.iter().zip(f).filter(|(&d, _)| d <= t).map(|(_, &x)| x).sum();
    Ok(g * grid.mesh * grid.mesh * sum)
}

/// Where a radius sits relative to the admissible window `[2h, diam/4]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    /// Below two mesh steps, or the cluster is too small for any window.
    SubResolution,
    Window,
    /// Above a quarter of the diameter.
    Saturated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeRow {
    pub r: f64,
    pub minkowski: f64,
    pub field_mass: f64,
    pub ratio: f64,
    pub resolution: Resolution,
}

/// Minkowski measure over field measure for each radius.
pub fn gauge_ratio(
    cluster: &ExcursionCluster,
    field: &Field,
    radii: &[f64],
    f: &[f64],
) -> Result<Vec<GaugeRow>> {
    let field_mass = evaluate_measure(cluster, field, f)?;
    if !(field_mass > 0.0) {
        return Err(Error::ZeroMass);
    }
    let domain = field.domain();
    let grid = distance_transform(cluster, domain)?;
    let h = domain.mesh();
    let lo = 2.0 * h * (1.0 - 1e-12);
    let hi = cluster.diameter / 4.0 * (1.0 + 1e-12);
    radii
        .iter()
        .map(|&r| {
            let minkowski = minkowski_measure(&grid, r, f)?;
            let resolution = if r < lo || hi < lo {
                Resolution::SubResolution
            } else if r > hi {
                Resolution::Saturated
            } else {
                Resolution::Window
            };
            Ok(GaugeRow { r, minkowski, field_mass, ratio: minkowski / field_mass, resolution })
        })
        .collect()
}

pub const CSV_HEADER: &str = "n,cluster_rank,r,minkowski,field_mass,ratio";

pub fn write_csv_rows<W: Write>(out: &mut W, n: u32, rank: usize, rows: &[GaugeRow]) -> io::Result<()> {
    for row in rows {
        writeln!(out, "{n},{rank},{},{},{},{}", row.r, row.minkowski, row.field_mass, row.ratio)?;
    }
    Ok(())
}
