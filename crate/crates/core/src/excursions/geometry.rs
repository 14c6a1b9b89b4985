//! Exact Euclidean diameter of lattice point sets.

use crate::lattice::Site;

const BRUTE_FORCE_MAX: usize = 32;

fn dist2(a: Site, b: Site) -> i64 {
    let dx = (a.i - b.i) as i64;
    let dy = (a.j - b.j) as i64;
    dx * dx + dy * dy
}

fn cross(o: Site, a: Site, b: Site) -> i64 {
    (a.i - o.i) as i64 * (b.j - o.j) as i64 - (a.j - o.j) as i64 * (b.i - o.i) as i64
}

/// Maximum squared distance over all pairs, by enumeration.
pub fn diameter2_brute(points: &[Site]) -> i64 {
    let mut best = 0;
    for (k, &a) in points.iter().enumerate() {
        for &b in &points[k + 1..] {
            best = best.max(dist2(a, b));
        }
    }
    best
}

/// Convex hull, counter-clockwise, collinear points dropped.
pub fn convex_hull(points: &[Site]) -> Vec<Site> {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<Site> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Maximum squared distance over all pairs (lattice units squared).
pub fn diameter2(points: &[Site]) -> i64 {
    if points.len() <= BRUTE_FORCE_MAX {
        return diameter2_brute(points);
    }
    let hull = convex_hull(points);
    let m = hull.len();
    if m <= 3 {
        return diameter2_brute(&hull);
    }
    // rotating calipers over antipodal pairs
    let mut best = 0;
    let mut j = 1;
    for i in 0..m {
        let ni = (i + 1) % m;
        while cross(hull[i], hull[ni], hull[(j + 1) % m]) > cross(hull[i], hull[ni], hull[j]) {
            j = (j + 1) % m;
        }
        best = best.max(dist2(hull[i], hull[j])).max(dist2(hull[ni], hull[j]));
    }
    best
}
