//! Reproducible replica streams.
//!
//! Every random quantity of replica `r` comes from its own ChaCha8 stream
//! seeded by [`derive_seed`], so replicas can be generated in any order, or
//! concurrently, and still give identical results.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::excursions::{decompose, decompose_discrete, Decomposition, Mode};
use crate::lattice::{Field, GreenOperator, LatticeDomain};
use crate::metric::{sample_openings, EdgeState};

/// Identifier of the seed derivation rule, recorded in run manifests.
pub const SEED_RULE: &str = "splitmix64-chain-v1";

/// Independent random streams of one replica.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Stream {
    Field = 1,
    Openings = 2,
    Bridge = 3,
    Auxiliary = 4,
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `splitmix(splitmix(splitmix(base) ^ replica) ^ tag)`. The last step is a
/// bijection, so different tags never collide for the same base and replica.
pub fn derive_seed(base: u64, replica: u64, stream: Stream) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ replica) ^ stream as u64)
}

pub fn stream_rng(base: u64, replica: u64, stream: Stream) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, replica, stream))
}

/// One field with its edge openings.
#[derive(Debug, Clone)]
pub struct Replica {
    pub field: Field,
    pub openings: Vec<EdgeState>,
}

impl Replica {
    pub fn decompose(&self, mode: Mode) -> Decomposition {
        match mode {
            Mode::Metric => decompose(&self.field, &self.openings).expect("sampled openings are consistent"),
            Mode::Discrete => decompose_discrete(&self.field),
        }
    }
}

/// Sampler for the metric-graph GFF on a fixed domain.
#[derive(Debug)]
pub struct Ensemble {
    green: GreenOperator,
    seed: u64,
}

impl Ensemble {
    pub fn new(domain: Arc<LatticeDomain>, seed: u64) -> Result<Self> {
        Ok(Ensemble { green: GreenOperator::new(domain)?, seed })
    }

    /// The square `(-1, 1)^2` at mesh `2^-level`.
    pub fn standard(level: u32, seed: u64) -> Result<Self> {
        Self::new(Arc::new(LatticeDomain::standard(level)?), seed)
    }

    pub fn green(&self) -> &GreenOperator {
        &self.green
    }

    pub fn domain(&self) -> &Arc<LatticeDomain> {
        self.green.domain()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rng(&self, replica: u64, stream: Stream) -> ChaCha8Rng {
        stream_rng(self.seed, replica, stream)
    }

    pub fn field(&self, replica: u64) -> Field {
        self.green.sample_field(&mut self.rng(replica, Stream::Field))
    }

    pub fn replica(&self, replica: u64) -> Replica {
        let field = self.field(replica);
        let openings = sample_openings(&field, &mut self.rng(replica, Stream::Openings));
        Replica { field, openings }
    }
}
