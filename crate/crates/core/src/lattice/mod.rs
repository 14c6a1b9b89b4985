//! Lattice domains, the exact discrete Green's function and zero-boundary
//! discrete GFF sampling.

mod cholesky;
mod domain;
mod field;
mod green;

pub use cholesky::{nested_dissection, SparseCholesky, SymmetricCsr};
pub use domain::{DomainShape, Edge, EdgeEnd, LatticeDomain, Site};
pub use field::Field;
pub use green::GreenOperator;

pub(crate) use domain::NONE;
