//! Sparse Cholesky factorization `P A P^T = L L^T` for symmetric positive
//! definite matrices on lattice graphs.
//!
//! The fill-reducing permutation is a geometric nested dissection of the
//! vertex coordinates: split the bounding box along its longer axis by one
//! lattice line, order both halves recursively, then the separator. The
//! numeric factorization is the classic up-looking algorithm (one row of `L`
//! per step, pattern from the elimination tree).

use super::domain::Site;
use crate::error::{Error, Result};

const NONE: usize = usize::MAX;
const LEAF: usize = 48;

/// Symmetric matrix in compressed-row form, diagonal kept separately.
#[derive(Debug, Clone)]
pub struct SymmetricCsr {
    pub diag: Vec<f64>,
    pub offsets: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl SymmetricCsr {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (s, e) = (self.offsets[r], self.offsets[r + 1]);
        self.cols[s..e].iter().copied().zip(self.vals[s..e].iter().copied())
    }
}

/// Nested dissection order of lattice sites; returns `perm` with
/// `perm[new] = old`.
pub fn nested_dissection(sites: &[Site]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..sites.len()).collect();
    let mut out = Vec::with_capacity(sites.len());
    dissect(sites, &mut idx, &mut out);
    out
}

fn dissect(sites: &[Site], idx: &mut [usize], out: &mut Vec<usize>) {
    if idx.len() <= LEAF {
        out.extend_from_slice(idx);
        return;
    }
    let (mut imin, mut imax, mut jmin, mut jmax) = (i32::MAX, i32::MIN, i32::MAX, i32::MIN);
    for &k in idx.iter() {
        let s = sites[k];
        imin = imin.min(s.i);
        imax = imax.max(s.i);
        jmin = jmin.min(s.j);
        jmax = jmax.max(s.j);
    }
    let along_i = imax - imin >= jmax - jmin;
    let (lo, hi) = if along_i { (imin, imax) } else { (jmin, jmax) };
    if hi - lo < 2 {
        out.extend_from_slice(idx);
        return;
    }
    let mid = lo + (hi - lo) / 2;
    let key = |k: usize| if along_i { sites[k].i } else { sites[k].j };
    // three-way partition: < mid | > mid | == mid
    idx.sort_unstable_by_key(|&k| {
        let c = key(k);
        (if c < mid { 0 } else if c > mid { 1 } else { 2 }, k)
    });
    let n_left = idx.iter().take_while(|&&k| key(k) < mid).count();
    let n_right = idx[n_left..].iter().take_while(|&&k| key(k) > mid).count();
    let (left, rest) = idx.split_at_mut(n_left);
    let (right, sep) = rest.split_at_mut(n_right);
    dissect(sites, left, out);
    dissect(sites, right, out);
    out.extend_from_slice(sep);
}

/// Lower-triangular factor in compressed-column form. Within each column the
/// diagonal entry comes first and row indices increase.
#[derive(Debug, Clone)]
pub struct SparseCholesky {
    perm: Vec<usize>,
    iperm: Vec<usize>,
    colptr: Vec<usize>,
    rowidx: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseCholesky {
    pub fn factor(a: &SymmetricCsr, perm: Vec<usize>) -> Result<Self> {
        let n = a.n();
        assert_eq!(perm.len(), n, "permutation length");
        let mut iperm = vec![NONE; n];
        for (new, &old) in perm.iter().enumerate() {
            iperm[old] = new;
        }

        // strictly-upper part of the permuted matrix, by column
        let mut up_ptr = vec![0usize; n + 1];
        for k in 0..n {
            up_ptr[k + 1] = up_ptr[k] + a.row(perm[k]).filter(|&(c, _)| iperm[c] < k).count();
        }
        let mut up_row = vec![0usize; up_ptr[n]];
        let mut up_val = vec![0f64; up_ptr[n]];
        for k in 0..n {
            let mut p = up_ptr[k];
            for (c, v) in a.row(perm[k]) {
                if iperm[c] < k {
                    up_row[p] = iperm[c];
                    up_val[p] = v;
                    p += 1;
                }
            }
        }

        // elimination tree
        let mut parent = vec![NONE; n];
        let mut ancestor = vec![NONE; n];
        for k in 0..n {
            for &i0 in &up_row[up_ptr[k]..up_ptr[k + 1]] {
                let mut i = i0;
                while i != NONE && i < k {
                    let next = ancestor[i];
                    ancestor[i] = k;
                    if next == NONE {
                        parent[i] = k;
                        break;
                    }
                    i = next;
                }
            }
        }
        drop(ancestor);

        // column counts from the row subtrees
        let mut mark = vec![NONE; n];
        let mut counts = vec![1usize; n];
        for k in 0..n {
            mark[k] = k;
            for &i in &up_row[up_ptr[k]..up_ptr[k + 1]] {
                let mut j = i;
                while mark[j] != k {
                    counts[j] += 1;
                    mark[j] = k;
                    j = parent[j];
                }
            }
        }
        let mut colptr = vec![0usize; n + 1];
        for j in 0..n {
            colptr[j + 1] = colptr[j] + counts[j];
        }
        let nnz = colptr[n];
        let mut rowidx = vec![0u32; nnz];
        let mut vals = vec![0f64; nnz];
        let mut next: Vec<usize> = colptr[..n].to_vec();

        let mut x = vec![0f64; n];
        let mut order: Vec<usize> = Vec::with_capacity(n);
        let mut path: Vec<usize> = Vec::new();
        mark.fill(NONE);
        for k in 0..n {
            // pattern of row k, children before parents
            order.clear();
            mark[k] = k;
            for &i in &up_row[up_ptr[k]..up_ptr[k + 1]] {
                path.clear();
                let mut j = i;
                while mark[j] != k {
                    path.push(j);
                    mark[j] = k;
                    j = parent[j];
                }
                order.extend(path.iter().rev());
            }
            order.reverse();

            x[k] = a.diag[perm[k]];
            for p in up_ptr[k]..up_ptr[k + 1] {
                x[up_row[p]] = up_val[p];
            }
            let mut d = x[k];
            x[k] = 0.0;
            for &j in &order {
                let lkj = x[j] / vals[colptr[j]];
                x[j] = 0.0;
                for p in colptr[j] + 1..next[j] {
                    x[rowidx[p] as usize] -= vals[p] * lkj;
                }
                d -= lkj * lkj;
                rowidx[next[j]] = k as u32;
                vals[next[j]] = lkj;
                next[j] += 1;
            }
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite { pivot: k });
            }
            rowidx[next[k]] = k as u32;
            vals[next[k]] = d.sqrt();
            next[k] += 1;
        }
        Ok(SparseCholesky { perm, iperm, colptr, rowidx, vals })
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Solve `L y = b` in place (permuted ordering).
    fn forward(&self, y: &mut [f64]) {
        for j in 0..self.n() {
            let (s, e) = (self.colptr[j], self.colptr[j + 1]);
            let yj = y[j] / self.vals[s];
            y[j] = yj;
            if yj != 0.0 {
                for p in s + 1..e {
                    y[self.rowidx[p] as usize] -= self.vals[p] * yj;
                }
            }
        }
    }

    /// Solve `L^T x = y` in place (permuted ordering).
    fn backward(&self, x: &mut [f64]) {
        for j in (0..self.n()).rev() {
            let (s, e) = (self.colptr[j], self.colptr[j + 1]);
            let mut acc = x[j];
            for p in s + 1..e {
                acc -= self.vals[p] * x[self.rowidx[p] as usize];
            }
            x[j] = acc / self.vals[s];
        }
    }

    /// Solve `A x = b`, both in the original ordering.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut y: Vec<f64> = (0..n).map(|k| b[self.perm[k]]).collect();
        self.forward(&mut y);
        self.backward(&mut y);
        let mut out = vec![0.0; n];
        for k in 0..n {
            out[self.perm[k]] = y[k];
        }
        out
    }

    /// Column `w` of `A^{-1}`, original ordering.
    pub fn inverse_column(&self, w: usize) -> Vec<f64> {
        let n = self.n();
        let mut y = vec![0.0; n];
        y[self.iperm[w]] = 1.0;
        self.forward(&mut y);
        self.backward(&mut y);
        let mut out = vec![0.0; n];
        for k in 0..n {
            out[self.perm[k]] = y[k];
        }
        out
    }

    /// Map i.i.d. standard normals `z` (consumed as scratch) to a centred
    /// Gaussian vector with covariance `A^{-1}`, written in original order.
    pub fn correlate(&self, z: &mut [f64], out: &mut [f64]) {
        self.backward(z);
        for k in 0..self.n() {
            out[self.perm[k]] = z[k];
        }
    }

    /// Diagonal of `A^{-1}` (original ordering) by selected inversion on the
    /// pattern of `L`.
    pub fn inverse_diagonal(&self) -> Vec<f64> {
        let n = self.n();
        let mut z = vec![0f64; self.nnz()];
        let mut col_scaled: Vec<f64> = Vec::new();
        for j in (0..n).rev() {
            let (s, e) = (self.colptr[j], self.colptr[j + 1]);
            let ljj = self.vals[s];
            let rows = &self.rowidx[s + 1..e];
            col_scaled.clear();
            col_scaled.extend(self.vals[s + 1..e].iter().map(|v| v / ljj));
            for (ia, &a) in rows.iter().enumerate() {
                let a = a as usize;
                let mut acc = 0.0;
                // b < a: entry (a, b) lives in column b
                for (ib, &b) in rows[..ia].iter().enumerate() {
                    acc += self.lookup(&z, b as usize, a) * col_scaled[ib];
                }
                // b >= a: entries (b, a) live in column a, scan it in step
                let (sa, ea) = (self.colptr[a], self.colptr[a + 1]);
                let mut p = sa;
                for (ib, &b) in rows.iter().enumerate().skip(ia) {
                    while self.rowidx[p] < b {
                        p += 1;
                    }
                    debug_assert!(p < ea && self.rowidx[p] == b);
                    acc += z[p] * col_scaled[ib];
                }
                z[s + 1 + ia] = -acc;
            }
            let mut diag = 1.0 / (ljj * ljj);
            for (ib, _) in rows.iter().enumerate() {
                diag -= col_scaled[ib] * z[s + 1 + ib];
            }
            z[s] = diag;
        }
        let mut out = vec![0.0; n];
        for k in 0..n {
            out[self.perm[k]] = z[self.colptr[k]];
        }
        out
    }

    fn lookup(&self, z: &[f64], col: usize, row: usize) -> f64 {
        let (s, e) = (self.colptr[col], self.colptr[col + 1]);
        let r = row as u32;
        match self.rowidx[s..e].binary_search(&r) {
            Ok(p) => z[s + p],
            Err(_) => unreachable!("selected inverse entry outside the filled pattern"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_laplacian(m: usize) -> (Vec<Site>, SymmetricCsr) {
        let mut sites = Vec::new();
        for j in 0..m {
            for i in 0..m {
                sites.push(Site::new(i as i32, j as i32));
            }
        }
        let mut offsets = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for j in 0..m {
            for i in 0..m {
                let mut push = |c: usize| {
                    cols.push(c);
                    vals.push(-1.0);
                };
                if i > 0 {
                    push(j * m + i - 1);
                }
                if i + 1 < m {
                    push(j * m + i + 1);
                }
                if j > 0 {
                    push((j - 1) * m + i);
                }
                if j + 1 < m {
                    push((j + 1) * m + i);
                }
                offsets.push(cols.len());
            }
        }
        (sites, SymmetricCsr { diag: vec![4.0; m * m], offsets, cols, vals })
    }

    fn dense_inverse(a: &SymmetricCsr) -> Vec<Vec<f64>> {
        let n = a.n();
        let mut m = vec![vec![0.0; 2 * n]; n];
        for r in 0..n {
            m[r][r] = a.diag[r];
            for (c, v) in a.row(r) {
                m[r][c] = v;
            }
            m[r][n + r] = 1.0;
        }
        for c in 0..n {
            let piv = m[c][c];
            for x in m[c].iter_mut() {
                *x /= piv;
            }
            for r in 0..n {
                if r != c {
                    let f = m[r][c];
                    if f != 0.0 {
                        let row_c = m[c].clone();
                        for (x, y) in m[r].iter_mut().zip(row_c) {
                            *x -= f * y;
                        }
                    }
                }
            }
        }
        m.into_iter().map(|row| row[n..].to_vec()).collect()
    }

    #[test]
    fn nested_dissection_is_a_permutation() {
        let (sites, _) = grid_laplacian(37);
        let mut p = nested_dissection(&sites);
        p.sort_unstable();
        assert_eq!(p, (0..sites.len()).collect::<Vec<_>>());
    }

    #[test]
    fn matches_dense_inverse() {
        let (sites, a) = grid_laplacian(11);
        let chol = SparseCholesky::factor(&a, nested_dissection(&sites)).unwrap();
        let inv = dense_inverse(&a);
        let diag = chol.inverse_diagonal();
        for w in [0, 5, 60, 120] {
            let col = chol.inverse_column(w);
            for v in 0..a.n() {
                assert!((col[v] - inv[v][w]).abs() < 1e-13, "G[{v},{w}]");
            }
        }
        for v in 0..a.n() {
            assert!((diag[v] - inv[v][v]).abs() < 1e-13);
        }
    }

    #[test]
    fn natural_order_also_works() {
        let (_, a) = grid_laplacian(6);
        let chol = SparseCholesky::factor(&a, (0..36).collect()).unwrap();
        let b: Vec<f64> = (0..36).map(|k| (k as f64).sin()).collect();
        let x = chol.solve(&b);
        for r in 0..36 {
            let mut ax = a.diag[r] * x[r];
            for (c, v) in a.row(r) {
                ax += v * x[c];
            }
            assert!((ax - b[r]).abs() < 1e-12);
        }
    }

    #[test]
    fn indefinite_matrix_rejected() {
        let (sites, mut a) = grid_laplacian(4);
        a.diag[5] = 0.5;
        let err = SparseCholesky::factor(&a, nested_dissection(&sites)).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { .. }));
    }
}
