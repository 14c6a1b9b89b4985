use std::sync::{Arc, OnceLock};

use rand::Rng;
use rand_distr::StandardNormal;

use super::cholesky::{nested_dissection, SparseCholesky, SymmetricCsr};
use super::domain::LatticeDomain;
use super::field::Field;
use crate::error::{Error, Result};

/// Exact Dirichlet Green's function of a lattice domain: the inverse of the
/// graph Laplacian restricted to interior vertices, held as a sparse Cholesky
/// factor.
///
/// The Laplacian has unit conductance per edge and diagonal equal to the full
/// graph degree, so its inverse carries the `(1/2pi) log` divergence of the
/// continuum Green's function.
#[derive(Debug)]
pub struct GreenOperator {
    domain: Arc<LatticeDomain>,
    factor: SparseCholesky,
    diagonal: OnceLock<Vec<f64>>,
}

impl GreenOperator {
    pub fn new(domain: Arc<LatticeDomain>) -> Result<Self> {
        let extra = vec![0.0; domain.num_interior()];
        Self::build(domain, &extra)
    }

    /// Green operator where interior vertex `v` sees an extra conductance
    /// `extra[v]` to ground on top of its unit edges. Used for metric-graph
    /// complements whose Dirichlet points sit part-way along edges.
    pub fn with_extra_conductance(domain: Arc<LatticeDomain>, extra: &[f64]) -> Result<Self> {
        if extra.len() != domain.num_interior() {
            return Err(Error::InvalidParameter(format!(
                "{} conductances for {} vertices",
                extra.len(),
                domain.num_interior()
            )));
        }
        if extra.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::InvalidParameter("conductances must be finite and nonnegative".into()));
        }
        Self::build(domain, extra)
    }

    fn build(domain: Arc<LatticeDomain>, extra: &[f64]) -> Result<Self> {
        let n = domain.num_interior();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut cols = Vec::with_capacity(4 * n);
        for v in 0..n {
            cols.extend(domain.neighbours(v).into_iter().flatten());
            offsets.push(cols.len());
        }
        let vals = vec![-1.0; cols.len()];
        let diag = extra.iter().map(|c| 4.0 + c).collect();
        let a = SymmetricCsr { diag, offsets, cols, vals };
        let factor = SparseCholesky::factor(&a, nested_dissection(domain.interior_vertices()))?;
        Ok(GreenOperator { domain, factor, diagonal: OnceLock::new() })
    }

    pub fn domain(&self) -> &Arc<LatticeDomain> {
        &self.domain
    }

    pub fn factor_nnz(&self) -> usize {
        self.factor.nnz()
    }

    fn check(&self, v: usize) -> Result<()> {
        let len = self.domain.num_interior();
        if v < len {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: v, len })
        }
    }

    /// `G(v, w)`.
    pub fn green(&self, v: usize, w: usize) -> Result<f64> {
        self.check(v)?;
        self.check(w)?;
        Ok(self.factor.inverse_column(w)[v])
    }

    /// `G(., w)` over all interior vertices.
    pub fn column(&self, w: usize) -> Result<Vec<f64>> {
        self.check(w)?;
        Ok(self.factor.inverse_column(w))
    }

    /// `G(v, v)` for every interior vertex; computed once and cached.
    pub fn diagonal(&self) -> &[f64] {
        self.diagonal.get_or_init(|| self.factor.inverse_diagonal())
    }

    /// Solve `L x = b`.
    pub fn apply(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.domain.num_interior() {
            return Err(Error::DomainMismatch);
        }
        Ok(self.factor.solve(b))
    }

    /// Centred Gaussian field with covariance `G`.
    pub fn sample_field<R: Rng + ?Sized>(&self, rng: &mut R) -> Field {
        let n = self.domain.num_interior();
        let mut z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let mut values = vec![0.0; n];
        self.factor.correlate(&mut z, &mut values);
        Field::from_parts(self.domain.clone(), values)
    }
}
