//! Monte Carlo laboratory for the sign-excursion decomposition of the
//! two-dimensional Gaussian free field.
//!
//! A zero-boundary discrete GFF is sampled exactly on a dyadic lattice
//! approximation of a planar domain, extended to the metric graph through
//! per-edge Brownian-bridge sign indicators, and cut into sign clusters. The
//! remaining modules measure the resulting decomposition: reconstruction and
//! partial sums, Minkowski-gauge content, annulus crossings, the rescaled
//! spin field, and a battery of statistical identities.
//!
//! Normalization: the Green's function diverges like `(1/2pi) log(1/|z-w|)`
//! and the height gap is `2 lambda = sqrt(pi/2)`.

pub mod crossing;
pub mod ensemble;
pub mod error;
pub mod excursions;
pub mod functions;
pub mod harness;
pub mod lattice;
pub mod metric;
pub mod minkowski;
pub mod spinmodel;
pub mod stats;

pub use error::{Error, Result};

pub use ensemble::{Ensemble, Replica, Stream};
pub use excursions::{Decomposition, ExcursionCluster, Mode, Sign};
pub use functions::TestFunction;
pub use lattice::{DomainShape, Field, GreenOperator, LatticeDomain, Site};
pub use metric::EdgeState;
