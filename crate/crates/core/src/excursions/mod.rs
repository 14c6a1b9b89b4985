//! Sign-excursion decomposition: clusters, signs and vertex-carried measures.

mod geometry;
mod nesting;
mod raster;
mod sobolev;
mod union_find;

use std::cmp::Ordering;
use std::sync::Arc;

pub use geometry::{convex_hull, diameter2, diameter2_brute};
pub use nesting::Nesting;
pub use raster::{read_raster, write_raster};
pub use sobolev::{sobolev_norm, SobolevSpec};
pub use union_find::UnionFind;

use crate::error::{Error, Result};
use crate::lattice::{Field, LatticeDomain, Site, NONE};
use crate::metric::{check_openings, EdgeState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(x: f64) -> Option<Sign> {
        if x > 0.0 {
            Some(Sign::Plus)
        } else if x < 0.0 {
            Some(Sign::Minus)
        } else {
            None
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// How clusters are connected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Through edges whose bridge keeps one sign.
    Metric,
    /// Through every nearest-neighbour edge joining equal signs.
    Discrete,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExcursionCluster {
    /// Interior vertex indices, ascending.
    pub vertices: Vec<usize>,
    pub sign: Sign,
    /// `h^2 sum |phi|` over the cluster.
    pub mass: f64,
    /// Euclidean diameter in continuum units.
    pub diameter: f64,
    /// Lexicographically smallest member site.
    pub id: Site,
    diameter2: i64,
}

impl ExcursionCluster {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Diameter in lattice units, squared. Exact, used for ordering.
    pub fn diameter_squared_lattice(&self) -> i64 {
        self.diameter2
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        other.diameter2.cmp(&self.diameter2).then(self.id.cmp(&other.id))
    }
}

/// Clusters in canonical order: decreasing diameter, ties by `id`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    domain: Arc<LatticeDomain>,
    mode: Mode,
    clusters: Vec<ExcursionCluster>,
    labels: Vec<u32>,
    connected: Vec<bool>,
}

impl PartialEq for Decomposition {
    fn eq(&self, other: &Self) -> bool {
        self.mode == other.mode && *self.domain == *other.domain && self.clusters == other.clusters
    }
}

/// Metric-graph decomposition: components of the open edges.
pub fn decompose(field: &Field, openings: &[EdgeState]) -> Result<Decomposition> {
    check_openings(field, openings)?;
    let connected = openings.iter().map(|s| s.omega).collect();
    Ok(Decomposition::from_connectivity(field, connected, Mode::Metric, false))
}

/// Nearest-neighbour sign clusters of the discrete field.
pub fn decompose_discrete(field: &Field) -> Decomposition {
    let phi = field.values();
    let connected = field
        .domain()
        .edges()
        .iter()
        .map(|e| matches!(e.interior_pair(), Some((a, b)) if phi[a] * phi[b] > 0.0))
        .collect();
    Decomposition::from_connectivity(field, connected, Mode::Discrete, false)
}

impl Decomposition {
    /// `reverse` joins edges in the opposite order; the result must not change.
    fn from_connectivity(field: &Field, connected: Vec<bool>, mode: Mode, reverse: bool) -> Self {
        let domain = field.domain().clone();
        let phi = field.values();
        let n = domain.num_interior();
        let h = domain.mesh();
        let mut uf = UnionFind::new(n);
        let edges = domain.edges();
        let mut join = |k: usize| {
            if connected[k] {
                if let Some((a, b)) = edges[k].interior_pair() {
                    uf.union(a, b);
                }
            }
        };
        if reverse {
            (0..edges.len()).rev().for_each(&mut join);
        } else {
            (0..edges.len()).for_each(&mut join);
        }

        let mut slot = vec![NONE; n];
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for v in 0..n {
            if phi[v] == 0.0 {
                continue;
            }
            let r = uf.find(v);
            if slot[r] == NONE {
                slot[r] = groups.len() as u32;
                groups.push(Vec::new());
            }
            groups[slot[r] as usize].push(v);
        }

        let mut clusters: Vec<ExcursionCluster> = groups
            .into_iter()
            .map(|vertices| {
                let sign = Sign::of(phi[vertices[0]]).expect("nonzero");
                let mass = h * h * vertices.iter().map(|&v| phi[v].abs()).sum::<f64>();
                let sites: Vec<Site> = vertices.iter().map(|&v| domain.site(v)).collect();
                let id = *sites.iter().min().expect("nonempty");
                let d2 = diameter2(&sites);
                ExcursionCluster { vertices, sign, mass, diameter: (d2 as f64).sqrt() * h, id, diameter2: d2 }
            })
            .collect();
        clusters.sort_by(ExcursionCluster::canonical_cmp);

        let mut labels = vec![NONE; n];
        for (k, c) in clusters.iter().enumerate() {
            for &v in &c.vertices {
                labels[v] = k as u32;
            }
        }
        Decomposition { domain, mode, clusters, labels, connected }
    }

    pub fn domain(&self) -> &Arc<LatticeDomain> {
        &self.domain
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn clusters(&self) -> &[ExcursionCluster] {
        &self.clusters
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Rank of the cluster containing `v`, if any.
    pub fn label(&self, v: usize) -> Option<usize> {
        match self.labels[v] {
            NONE => None,
            k => Some(k as usize),
        }
    }

    pub(crate) fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Whether edge `e` joins its endpoints into one cluster.
    pub fn edge_connects(&self, e: usize) -> bool {
        self.connected[e]
    }

    fn check_field(&self, field: &Field) -> Result<()> {
        if field.same_domain(&self.domain) {
            Ok(())
        } else {
            Err(Error::DomainMismatch)
        }
    }

    /// `sum_k sigma_k |phi|` on every cluster; equals the field.
    pub fn reconstruct(&self, field: &Field) -> Result<Field> {
        self.partial_sum(field, self.clusters.len())
    }

    /// The first `count` terms of the reconstruction. Counts beyond the number
    /// of clusters give the full reconstruction.
    pub fn partial_sum(&self, field: &Field, count: usize) -> Result<Field> {
        self.check_field(field)?;
        let phi = field.values();
        let mut out = vec![0.0; phi.len()];
        for c in self.clusters.iter().take(count) {
            let s = c.sign.value();
            for &v in &c.vertices {
                out[v] = s * phi[v].abs();
            }
        }
        Field::new(self.domain.clone(), out)
    }

    /// Clusters containing a vertex of `path` and the union of those clusters
    /// with the path. The path must start next to the boundary and move between
    /// lattice neighbours.
    pub fn clusters_hitting_path(&self, path: &[usize]) -> Result<PathHit> {
        let n = self.domain.num_interior();
        let first = *path.first().ok_or_else(|| Error::InvalidPath("empty path".into()))?;
        for &v in path {
            if v >= n {
                return Err(Error::IndexOutOfRange { index: v, len: n });
            }
        }
        if !self.domain.touches_boundary(first) {
            return Err(Error::InvalidPath(format!("path starts at vertex {first}, which is not next to the boundary")));
        }
        for w in path.windows(2) {
            if !self.domain.neighbours(w[0]).contains(&Some(w[1])) {
                return Err(Error::InvalidPath(format!("vertices {} and {} are not adjacent", w[0], w[1])));
            }
        }
        let mut ranks: Vec<usize> = path.iter().filter_map(|&v| self.label(v)).collect();
        ranks.sort_unstable();
        ranks.dedup();
        let mut inside = vec![false; n];
        for &v in path {
            inside[v] = true;
        }
        for &k in &ranks {
            for &v in &self.clusters[k].vertices {
                inside[v] = true;
            }
        }
        Ok(PathHit { clusters: ranks, inside })
    }
}

/// Result of [`Decomposition::clusters_hitting_path`].
#[derive(Debug, Clone, PartialEq)]
pub struct PathHit {
    /// Ranks of the hit clusters, ascending.
    pub clusters: Vec<usize>,
    /// Membership of each interior vertex in the hit clusters or the path.
    pub inside: Vec<bool>,
}

impl PathHit {
    pub fn vertices(&self) -> Vec<usize> {
        (0..self.inside.len()).filter(|&v| self.inside[v]).collect()
    }
}

/// `(nu_k, f) = h^2 sum_{v in C} f(v) |phi(v)|`.
pub fn evaluate_measure(cluster: &ExcursionCluster, field: &Field, f: &[f64]) -> Result<f64> {
    let n = field.values().len();
    if f.len() != n {
        return Err(Error::DomainMismatch);
    }
    let phi = field.values();
    let h = field.domain().mesh();
    let mut sum = 0.0;
    for &v in &cluster.vertices {
        if v >= n {
            return Err(Error::IndexOutOfRange { index: v, len: n });
        }
        sum += f[v] * phi[v].abs();
    }
    Ok(h * h * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{DomainShape, GreenOperator};
    use crate::metric::sample_openings;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Three interior vertices in a row at level 2, indices left to right.
    fn row3() -> Arc<LatticeDomain> {
        let s = DomainShape::rectangle(1.0, 0.5, (0.0, 0.0)).unwrap();
        let d = LatticeDomain::build(&s, 2).unwrap();
        assert_eq!(d.num_interior(), 3);
        Arc::new(d)
    }

    fn row3_openings(f: &Field, open12: bool) -> Vec<EdgeState> {
        f.domain()
            .edges()
            .iter()
            .enumerate()
            .map(|(k, e)| {
                let omega = open12 && e.interior_pair() == Some((0, 1));
                EdgeState { edge: k, omega, p: 0.0, coupling: 0.0 }
            })
            .collect()
    }

    fn sample(level: u32, seed: u64) -> (Field, Vec<EdgeState>) {
        let d = Arc::new(LatticeDomain::standard(level).unwrap());
        let g = GreenOperator::new(d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = g.sample_field(&mut rng);
        let o = sample_openings(&f, &mut rng);
        (f, o)
    }

    #[test]
    fn three_vertex_example() {
        let d = row3();
        let h = d.mesh();
        let f = Field::new(d, vec![1.0, 2.0, -1.0]).unwrap();
        let dec = decompose(&f, &row3_openings(&f, true)).unwrap();
        let c = dec.clusters();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].vertices, vec![0, 1]);
        assert_eq!(c[0].sign, Sign::Plus);
        assert!((c[0].mass - 3.0 * h * h).abs() < 1e-15);
        assert!((c[0].diameter - h).abs() < 1e-15);
        assert_eq!(c[1].vertices, vec![2]);
        assert_eq!(c[1].sign, Sign::Minus);
        assert!((c[1].mass - h * h).abs() < 1e-15);
        assert_eq!(c[1].diameter, 0.0);

        assert_eq!(dec.reconstruct(&f).unwrap().values(), &[1.0, 2.0, -1.0]);
        assert_eq!(dec.partial_sum(&f, 0).unwrap().values(), &[0.0, 0.0, 0.0]);
        assert_eq!(dec.partial_sum(&f, 1).unwrap().values(), &[1.0, 2.0, 0.0]);
        assert_eq!(dec.partial_sum(&f, 99).unwrap().values(), dec.reconstruct(&f).unwrap().values());

        let one = vec![1.0; 3];
        assert_eq!(evaluate_measure(&c[0], &f, &one).unwrap(), c[0].mass);
        assert_eq!(evaluate_measure(&c[0], &f, &[0.0; 3]).unwrap(), 0.0);
        let half = vec![1.0, 0.0, 0.0];
        assert!((evaluate_measure(&c[0], &f, &half).unwrap() - h * h).abs() < 1e-15);
    }

    #[test]
    fn closed_edges_give_singletons_in_id_order() {
        let d = row3();
        let f = Field::new(d, vec![1.0, 2.0, -1.0]).unwrap();
        let dec = decompose(&f, &row3_openings(&f, false)).unwrap();
        let order: Vec<Vec<usize>> = dec.clusters().iter().map(|c| c.vertices.clone()).collect();
        assert_eq!(order, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn open_edge_across_sign_change_is_rejected() {
        let d = row3();
        let f = Field::new(d, vec![1.0, -2.0, -1.0]).unwrap();
        assert!(matches!(
            decompose(&f, &row3_openings(&f, true)),
            Err(Error::InvalidEdgeState { .. })
        ));
    }

    #[test]
    fn all_positive_field_is_one_cluster() {
        let d = Arc::new(LatticeDomain::standard(3).unwrap());
        let f = Field::from_fn(d.clone(), |_, _| 1.0).unwrap();
        let open: Vec<EdgeState> = d
            .edges()
            .iter()
            .enumerate()
            .map(|(k, e)| EdgeState { edge: k, omega: e.interior_pair().is_some(), p: 0.0, coupling: 0.0 })
            .collect();
        let dec = decompose(&f, &open).unwrap();
        assert_eq!(dec.len(), 1);
        assert_eq!(dec.clusters()[0].len(), d.num_interior());
        assert_eq!(decompose_discrete(&f).len(), 1);
        let edge = d.num_interior() - 1;
        let hit = dec.clusters_hitting_path(&[edge]).unwrap();
        assert_eq!(hit.clusters, vec![0]);
    }

    #[test]
    fn checkerboard_is_all_singletons() {
        let d = Arc::new(LatticeDomain::standard(3).unwrap());
        let f = Field::from_fn(d.clone(), |x, y| {
            if ((x * 8.0).round() + (y * 8.0).round()) as i64 % 2 == 0 { 1.0 } else { -1.0 }
        })
        .unwrap();
        let dec = decompose_discrete(&f);
        assert_eq!(dec.len(), d.num_interior());
        assert!(dec.clusters().iter().all(|c| c.len() == 1));
    }

    #[test]
    fn zero_field_has_no_clusters() {
        let d = Arc::new(LatticeDomain::standard(2).unwrap());
        let f = Field::zeros(d);
        let dec = decompose_discrete(&f);
        assert!(dec.is_empty());
        assert!(dec.reconstruct(&f).unwrap().values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn sampled_fields_reconstruct_and_refine() {
        for seed in 0..5 {
            let (f, o) = sample(5, seed);
            let dec = decompose(&f, &o).unwrap();
            let dis = decompose_discrete(&f);
            let r = dec.reconstruct(&f).unwrap();
            for (a, b) in r.values().iter().zip(f.values()) {
                assert!((a - b).abs() <= 1e-12);
            }
            let covered: usize = dec.clusters().iter().map(|c| c.len()).sum();
            assert_eq!(covered, f.values().iter().filter(|x| **x != 0.0).count());
            // each metric cluster sits inside one discrete cluster
            for c in dec.clusters() {
                let k = dis.label(c.vertices[0]);
                assert!(c.vertices.iter().all(|&v| dis.label(v) == k));
                assert!(c.vertices.iter().all(|&v| dec.label(v).is_some()));
            }
            assert!(dec.len() >= dis.len());
            for w in dec.clusters().windows(2) {
                assert!(w[0].canonical_cmp(&w[1]) == Ordering::Less);
                assert!(w[0].diameter >= w[1].diameter);
            }
        }
    }

    #[test]
    fn union_order_does_not_matter() {
        let (f, o) = sample(5, 42);
        let connected: Vec<bool> = o.iter().map(|s| s.omega).collect();
        let a = Decomposition::from_connectivity(&f, connected.clone(), Mode::Metric, false);
        let b = Decomposition::from_connectivity(&f, connected, Mode::Metric, true);
        assert_eq!(a, b);
        assert_eq!(a.labels, b.labels);
    }

    #[test]
    fn path_queries() {
        let d = row3();
        let f = Field::new(d.clone(), vec![1.0, 2.0, -1.0]).unwrap();
        let dec = decompose(&f, &row3_openings(&f, true)).unwrap();
        let hit = dec.clusters_hitting_path(&[0]).unwrap();
        assert_eq!(hit.clusters, vec![0]);
        assert_eq!(hit.vertices(), vec![0, 1]);
        assert!(matches!(dec.clusters_hitting_path(&[0, 2]), Err(Error::InvalidPath(_))));
        assert!(matches!(dec.clusters_hitting_path(&[]), Err(Error::InvalidPath(_))));

        let z = Field::zeros(d);
        let dz = decompose_discrete(&z);
        let hit = dz.clusters_hitting_path(&[0, 1, 2]).unwrap();
        assert!(hit.clusters.is_empty());
        assert_eq!(hit.vertices(), vec![0, 1, 2]);
    }

    #[test]
    fn path_must_start_at_the_boundary() {
        let (f, o) = sample(3, 1);
        let dec = decompose(&f, &o).unwrap();
        let centre = f.domain().index_of(Site::new(0, 0)).unwrap();
        assert!(matches!(dec.clusters_hitting_path(&[centre]), Err(Error::InvalidPath(_))));
    }
}
