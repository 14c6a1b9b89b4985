use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate domain: no lattice point lies strictly inside the shape at mesh {mesh}")]
    DegenerateDomain { mesh: f64 },

    #[error("disconnected domain: interior graph has {components} components")]
    DisconnectedDomain { components: usize },

    #[error("invalid domain shape: {0}")]
    InvalidShape(String),

    #[error("vertex index {index} out of range for {len} interior vertices")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("invalid edge state at edge {edge}: {reason}")]
    InvalidEdgeState { edge: usize, reason: &'static str },

    #[error("objects live on different lattice domains")]
    DomainMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("gauge undefined for radius {r} (need 0 < r < 1)")]
    GaugeUndefined { r: f64 },

    #[error("cluster is empty")]
    EmptyCluster,

    #[error("excursion measure has zero mass against the test function")]
    ZeroMass,

    #[error("path is not a nearest-neighbour path starting next to the boundary: {0}")]
    InvalidPath(String),

    #[error("crossing estimator is only defined on the square (-1,1)^2")]
    NonStandardDomain,

    #[error("{}", ConfigErrors(.0))]
    Config(Vec<ConfigError>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One problem found while parsing an experiment configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

struct ConfigErrors<'a>(&'a [ConfigError]);

impl fmt::Display for ConfigErrors<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} configuration error(s)", self.0.len())?;
        for e in self.0 {
            write!(f, "\n  {e}")?;
        }
        Ok(())
    }
}
