use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::excursions::Mode;

use super::correlation;

/// Rademacher checks on the signs of the `K` largest clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct SignTestReport {
    pub k: usize,
    /// Mean sign per rank.
    pub means: Vec<f64>,
    /// `((j, k), corr(sigma_j, sigma_k))` for `j < k`.
    pub pair_correlations: Vec<((usize, usize), f64)>,
    /// `corr(sigma_k, diameter_k)` per rank.
    pub diameter_correlations: Vec<f64>,
    /// `corr(sigma_k, mass_k)` per rank; reported, not part of [`passed`](Self::passed).
    pub mass_correlations: Vec<f64>,
    pub used: usize,
    /// Samples with fewer than `K` clusters.
    pub skipped: usize,
    /// `3 / sqrt(used)`.
    pub threshold: f64,
    pub corrupted: bool,
}

impl SignTestReport {
    fn within(&self, xs: impl IntoIterator<Item = f64>) -> bool {
        self.used > 0 && xs.into_iter().all(|x| x.abs() <= self.threshold)
    }

    pub fn means_ok(&self) -> bool {
        self.within(self.means.iter().copied())
    }

    pub fn pairs_ok(&self) -> bool {
        self.within(self.pair_correlations.iter().map(|p| p.1))
    }

    pub fn diameters_ok(&self) -> bool {
        self.within(self.diameter_correlations.iter().copied())
    }

    pub fn passed(&self) -> bool {
        self.means_ok() && self.pairs_ok() && self.diameters_ok()
    }
}

/// Signs of the top `k` metric clusters over replicas `0..samples`. With
/// `corrupt`, the second sign is overwritten by the first, a null the test
/// must reject.
pub fn sign_independence_test(ensemble: &Ensemble, k: usize, samples: usize, corrupt: bool) -> Result<SignTestReport> {
    if k < 2 {
        return Err(Error::InvalidParameter("sign test needs K >= 2".into()));
    }
    let mut signs = vec![Vec::new(); k];
    let mut diam = vec![Vec::new(); k];
    let mut mass = vec![Vec::new(); k];
    let mut skipped = 0;
    for r in 0..samples as u64 {
        let dec = ensemble.replica(r).decompose(Mode::Metric);
        if dec.len() < k {
            skipped += 1;
            continue;
        }
        for (rank, c) in dec.clusters()[..k].iter().enumerate() {
            signs[rank].push(c.sign.value());
            diam[rank].push(c.diameter);
            mass[rank].push(c.mass);
        }
        if corrupt {
            let s = signs[0][signs[0].len() - 1];
            *signs[1].last_mut().expect("pushed above") = s;
        }
    }
    let used = signs[0].len();
    let means = signs.iter().map(|s| if s.is_empty() { 0.0 } else { s.iter().sum::<f64>() / s.len() as f64 }).collect();
    let mut pair_correlations = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            pair_correlations.push(((a, b), correlation(&signs[a], &signs[b])));
        }
    }
    Ok(SignTestReport {
        k,
        means,
        pair_correlations,
        diameter_correlations: (0..k).map(|r| correlation(&signs[r], &diam[r])).collect(),
        mass_correlations: (0..k).map(|r| correlation(&signs[r], &mass[r])).collect(),
        used,
        skipped,
        threshold: if used > 0 { 3.0 / (used as f64).sqrt() } else { 0.0 },
        corrupted: corrupt,
    })
}
