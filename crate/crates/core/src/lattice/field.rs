use std::sync::Arc;

use super::domain::LatticeDomain;
use crate::error::{Error, Result};

/// Real values on the interior vertices of a domain; boundary values are
/// implicitly zero.
#[derive(Debug, Clone)]
pub struct Field {
    domain: Arc<LatticeDomain>,
    values: Vec<f64>,
}

impl Field {
    pub fn new(domain: Arc<LatticeDomain>, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.num_interior() {
            return Err(Error::DomainMismatch);
        }
        if let Some(k) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!("field value at vertex {k} is not finite")));
        }
        Ok(Field { domain, values })
    }

    pub(crate) fn from_parts(domain: Arc<LatticeDomain>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), domain.num_interior());
        Field { domain, values }
    }

    pub fn zeros(domain: Arc<LatticeDomain>) -> Self {
        let n = domain.num_interior();
        Field { domain, values: vec![0.0; n] }
    }

    /// Field with values `f(x, y)` at the continuum vertex positions.
    pub fn from_fn(domain: Arc<LatticeDomain>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = (0..domain.num_interior())
            .map(|v| {
                let (x, y) = domain.position(v);
                f(x, y)
            })
            .collect();
        Self::new(domain, values)
    }

    pub fn domain(&self) -> &Arc<LatticeDomain> {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn same_domain(&self, other: &Arc<LatticeDomain>) -> bool {
        Arc::ptr_eq(&self.domain, other) || *self.domain == **other
    }

    /// Pointwise negation.
    pub fn negated(&self) -> Field {
        Field::from_parts(self.domain.clone(), self.values.iter().map(|x| -x).collect())
    }

    pub fn scaled(&self, c: f64) -> Field {
        Field::from_parts(self.domain.clone(), self.values.iter().map(|x| c * x).collect())
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        if !other.same_domain(&self.domain) {
            return Err(Error::DomainMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Field::from_parts(self.domain.clone(), values))
    }

    /// Lattice inner product `h^2 sum_v f(v) phi(v)`.
    pub fn pair(&self, f: &[f64]) -> f64 {
        let h = self.domain.mesh();
        h * h * self.values.iter().zip(f).map(|(a, b)| a * b).sum::<f64>()
    }
}
