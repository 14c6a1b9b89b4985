//! Hole structure of a decomposition.
//!
//! Contract clusters (and zero vertices) to nodes, add one node for the
//! boundary, and run a depth-first search from it. A hole of cluster `C` is a
//! component of the graph minus `C` that does not contain the boundary node;
//! in the DFS tree these are exactly the subtrees of children `c` of `C` with
//! `low[c] >= disc[C]`.

use super::Decomposition;
use crate::lattice::{EdgeEnd, NONE};

#[derive(Debug, Clone)]
pub struct Nesting {
    num_clusters: usize,
    // node 0 is the boundary, 1..=num_clusters the clusters by rank, then zero vertices
    node_offsets: Vec<usize>,
    node_vertices: Vec<usize>,
    children_offsets: Vec<usize>,
    children: Vec<u32>,
    hole_child: Vec<bool>,
    order: Vec<u32>,
    disc: Vec<u32>,
    size: Vec<u32>,
    on_boundary: Vec<bool>,
    outermost: Vec<bool>,
    owner: Vec<u32>,
}

impl Nesting {
    pub fn new(dec: &Decomposition) -> Self {
        let domain = dec.domain();
        let n = domain.num_interior();
        let labels = dec.labels();
        let c = dec.len();

        let mut node_of = vec![0u32; n];
        let mut zeros = 0u32;
        for v in 0..n {
            node_of[v] = match labels[v] {
                NONE => {
                    zeros += 1;
                    c as u32 + zeros
                }
                k => k + 1,
            };
        }
        let m = c + 1 + zeros as usize;

        let mut counts = vec![0usize; m + 1];
        for v in 0..n {
            counts[node_of[v] as usize + 1] += 1;
        }
        for k in 0..m {
            counts[k + 1] += counts[k];
        }
        let node_offsets = counts.clone();
        let mut fill = counts;
        let mut node_vertices = vec![0; n];
        for v in 0..n {
            let k = node_of[v] as usize;
            node_vertices[fill[k]] = v;
            fill[k] += 1;
        }

        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for e in domain.edges() {
            let a = node_of[e.a];
            let b = match e.b {
                EdgeEnd::Interior(b) => node_of[b],
                EdgeEnd::Boundary(_) => 0,
            };
            if a != b {
                pairs.push((a, b));
                pairs.push((b, a));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        let mut adj_offsets = vec![0usize; m + 1];
        for &(a, _) in &pairs {
            adj_offsets[a as usize + 1] += 1;
        }
        for k in 0..m {
            adj_offsets[k + 1] += adj_offsets[k];
        }
        let adj: Vec<u32> = pairs.iter().map(|p| p.1).collect();

        // iterative DFS with low links
        let mut disc = vec![u32::MAX; m];
        let mut low = vec![u32::MAX; m];
        let mut parent = vec![u32::MAX; m];
        let mut cursor = adj_offsets[..m].to_vec();
        let mut order = Vec::with_capacity(m);
        let mut stack = vec![0u32];
        disc[0] = 0;
        low[0] = 0;
        order.push(0u32);
        while let Some(&u) = stack.last() {
            let u = u as usize;
            if cursor[u] < adj_offsets[u + 1] {
                let w = adj[cursor[u]] as usize;
                cursor[u] += 1;
                if disc[w] == u32::MAX {
                    parent[w] = u as u32;
                    disc[w] = order.len() as u32;
                    low[w] = disc[w];
                    order.push(w as u32);
                    stack.push(w as u32);
                } else if w as u32 != parent[u] {
                    low[u] = low[u].min(disc[w]);
                }
            } else {
                stack.pop();
                if u != 0 {
                    let p = parent[u] as usize;
                    low[p] = low[p].min(low[u]);
                }
            }
        }
        debug_assert_eq!(order.len(), m, "every vertex reaches the boundary");

        let is_cluster = |k: usize| (1..=c).contains(&k);
        let mut size = vec![1u32; m];
        for &u in order.iter().rev() {
            let u = u as usize;
            if u != 0 {
                size[parent[u] as usize] += size[u];
            }
        }
        let mut hole_child = vec![false; m];
        let mut child_counts = vec![0usize; m + 1];
        for u in 1..m {
            let p = parent[u] as usize;
            child_counts[p + 1] += 1;
            hole_child[u] = is_cluster(p) && low[u] >= disc[p];
        }
        for k in 0..m {
            child_counts[k + 1] += child_counts[k];
        }
        let children_offsets = child_counts.clone();
        let mut children = vec![0u32; m.saturating_sub(1)];
        let mut fill = child_counts;
        for &u in &order[1..] {
            let p = parent[u as usize] as usize;
            children[fill[p]] = u;
            fill[p] += 1;
        }

        // top-down: the outermost cluster strictly enclosing each node
        let mut encloser = vec![NONE; m];
        for &u in &order[1..] {
            let u = u as usize;
            let p = parent[u] as usize;
            encloser[u] = match (hole_child[u], encloser[p]) {
                (true, NONE) => p as u32,
                (_, e) => e,
            };
        }
        let owner_node = |u: usize| if is_cluster(u) && encloser[u] == NONE { u as u32 } else { encloser[u] };
        let outermost: Vec<bool> = (1..=c).map(|k| encloser[k] == NONE).collect();
        let on_boundary: Vec<bool> = (1..=c).map(|k| adj[adj_offsets[k]..adj_offsets[k + 1]].contains(&0)).collect();
        let mut owner = vec![NONE; n];
        for v in 0..n {
            let o = owner_node(node_of[v] as usize);
            if o != NONE {
                owner[v] = o - 1;
            }
        }

        Nesting {
            num_clusters: c,
            node_offsets,
            node_vertices,
            children_offsets,
            children,
            hole_child,
            order,
            disc,
            size,
            on_boundary,
            outermost,
            owner,
        }
    }

    pub fn num_clusters(&self) -> usize {
        self.num_clusters
    }

    /// Not enclosed in a hole of any other cluster.
    pub fn is_outermost(&self, rank: usize) -> bool {
        self.outermost[rank]
    }

    /// Has a vertex next to the domain boundary.
    pub fn touches_boundary(&self, rank: usize) -> bool {
        self.on_boundary[rank]
    }

    /// Vertex sets (ascending) of the holes of cluster `rank`: components of
    /// the domain minus the cluster that are cut off from the boundary.
    pub fn holes(&self, rank: usize) -> Vec<Vec<usize>> {
        let node = rank + 1;
        let kids = &self.children[self.children_offsets[node]..self.children_offsets[node + 1]];
        kids.iter()
            .map(|&c| c as usize)
            .filter(|&c| self.hole_child[c])
            .map(|c| {
                let start = self.disc[c] as usize;
                let end = start + self.size[c] as usize;
                let mut verts: Vec<usize> = self.order[start..end]
                    .iter()
                    .flat_map(|&k| {
                        let k = k as usize;
                        self.node_vertices[self.node_offsets[k]..self.node_offsets[k + 1]].iter().copied()
                    })
                    .collect();
                verts.sort_unstable();
                verts
            })
            .collect()
    }

    /// Rank of the outermost cluster whose filled region (cluster plus holes)
    /// contains `v`.
    pub fn filled_owner(&self, v: usize) -> Option<usize> {
        match self.owner[v] {
            NONE => None,
            k => Some(k as usize),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::excursions::decompose_discrete;
    use crate::lattice::{Field, LatticeDomain, Site};
    use std::sync::Arc;

    /// Ring of + at sup-distance 2 around the origin, - inside, + at the
    /// centre, and - outside the ring.
    fn rings() -> Field {
        let d = Arc::new(LatticeDomain::standard(3).unwrap());
        let h = d.mesh();
        Field::from_fn(d, |x, y| {
            let r = ((x / h).round().abs()).max((y / h).round().abs()) as i32;
            match r {
                0 => 3.0,
                1 => -1.0,
                2 => 2.0,
                _ => -0.5,
            }
        })
        .unwrap()
    }

    #[test]
    fn rings_nest_inside_the_boundary_cluster() {
        let f = rings();
        let d = f.domain().clone();
        let dec = decompose_discrete(&f);
        assert_eq!(dec.len(), 4);
        let nest = Nesting::new(&dec);
        let rank_of = |s: Site| dec.label(d.index_of(s).unwrap()).unwrap();
        let outer = rank_of(Site::new(5, 5));
        let ring = rank_of(Site::new(2, 0));
        let inner = rank_of(Site::new(1, 0));
        let centre = rank_of(Site::new(0, 0));
        // the boundary cluster surrounds the ring, so only it is outermost
        assert!(nest.is_outermost(outer));
        assert!(!nest.is_outermost(ring) && !nest.is_outermost(inner) && !nest.is_outermost(centre));
        assert!(nest.touches_boundary(outer) && !nest.touches_boundary(ring));

        assert_eq!(nest.holes(outer).iter().map(Vec::len).collect::<Vec<_>>(), vec![25]);
        assert_eq!(nest.holes(ring).iter().map(Vec::len).collect::<Vec<_>>(), vec![9]);
        assert_eq!(nest.holes(inner).iter().map(Vec::len).collect::<Vec<_>>(), vec![1]);
        assert!(nest.holes(centre).is_empty());
        let c = d.index_of(Site::new(0, 0)).unwrap();
        assert_eq!(nest.filled_owner(c), Some(outer));
    }

    #[test]
    fn touching_clusters_do_not_enclose_each_other() {
        // left half +, right half -: two outermost clusters without holes
        let d = Arc::new(LatticeDomain::standard(3).unwrap());
        let f = Field::from_fn(d, |x, _| if x < 0.0 { 1.0 } else { -1.0 }).unwrap();
        let dec = decompose_discrete(&f);
        let nest = Nesting::new(&dec);
        assert_eq!(dec.len(), 2);
        for k in 0..2 {
            assert!(nest.is_outermost(k));
            assert!(nest.holes(k).is_empty());
        }
    }

    #[test]
    fn zero_vertices_do_not_form_holes() {
        // a + block surrounded by zeros all the way to the boundary
        let d = Arc::new(LatticeDomain::standard(3).unwrap());
        let h = d.mesh();
        let f = Field::from_fn(d.clone(), |x, y| {
            let r = ((x / h).round().abs()).max((y / h).round().abs()) as i32;
            if r < 2 { 1.0 } else { 0.0 }
        })
        .unwrap();
        let dec = decompose_discrete(&f);
        let nest = Nesting::new(&dec);
        let inner = dec.label(d.index_of(Site::new(0, 0)).unwrap()).unwrap();
        assert!(nest.is_outermost(inner));
        assert!(!nest.touches_boundary(inner));
        assert_eq!(dec.len(), 1);
        let far = d.index_of(Site::new(3, 3)).unwrap();
        assert_eq!(nest.filled_owner(far), None);
    }
}
