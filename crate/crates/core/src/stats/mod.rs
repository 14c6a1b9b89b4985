//! Statistical verifications of the decomposition: moment identities, sign
//! independence, the height gap, the Markov property along a path and the
//! small-components Green bound.

mod heightgap;
mod markov;
mod moments;
mod signs;
mod tail;

pub use heightgap::{height_gap_sample, height_gap_statistic, HeightGapReport, HeightGapSample};
pub use markov::{complement_green, default_probes, markov_check, straight_path, MarkovReport, ProbeReport};
pub use moments::{l2_identity_check, moment_inequality_check, ClusterSet, MomentReport, OrthogonalityReport};
pub use signs::{sign_independence_test, SignTestReport};
pub use tail::tail_norm;

/// The height gap `2 lambda = sqrt(pi/2)` and `lambda = sqrt(pi/8)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeightGapConstants {
    pub lambda: f64,
    pub two_lambda: f64,
}

const TWO_LAMBDA: f64 = 1.253_314_137_315_500_1;

pub const HEIGHT_GAP: HeightGapConstants = HeightGapConstants { lambda: TWO_LAMBDA / 2.0, two_lambda: TWO_LAMBDA };

/// Mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub count: usize,
}

impl Estimate {
    /// `mean / se`, zero for an exact zero.
    pub fn z(&self) -> f64 {
        if self.mean == 0.0 {
            0.0
        } else {
            self.mean / self.se
        }
    }
}

/// Streaming mean and variance.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Combine with an accumulator over disjoint data.
    pub fn merge(&mut self, other: &Welford) {
        if other.n == 0 {
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * self.n as f64 * other.n as f64 / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn estimate(&self) -> Estimate {
        let se = if self.n < 2 { 0.0 } else { (self.variance() / self.n as f64).sqrt() };
        Estimate { mean: self.mean, se, count: self.n }
    }
}

/// Pearson correlation of paired samples; zero when either side is constant.
pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len());
    if n < 2 {
        return 0.0;
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        assert_eq!(HEIGHT_GAP.two_lambda, 2.0 * HEIGHT_GAP.lambda);
        assert_eq!(HEIGHT_GAP.two_lambda, (std::f64::consts::PI / 2.0).sqrt());
        assert!((HEIGHT_GAP.lambda - (std::f64::consts::PI / 8.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn welford_matches_two_pass_and_merges() {
        let xs: Vec<f64> = (0..100).map(|k| ((k * 37) % 11) as f64 * 0.5 - 1.0).collect();
        let mut all = Welford::default();
        xs.iter().for_each(|&x| all.push(x));
        let mean = xs.iter().sum::<f64>() / 100.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 99.0;
        assert!((all.mean() - mean).abs() < 1e-13 && (all.variance() - var).abs() < 1e-12);
        let (mut a, mut b) = (Welford::default(), Welford::default());
        xs[..30].iter().for_each(|&x| a.push(x));
        xs[30..].iter().for_each(|&x| b.push(x));
        b.merge(&a);
        assert!((b.mean() - mean).abs() < 1e-13 && (b.variance() - var).abs() < 1e-12);
    }

    #[test]
    fn correlation_edge_cases() {
        assert!((correlation(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]) - 1.0).abs() < 1e-15);
        assert_eq!(correlation(&[1.0, 1.0], &[0.0, 5.0]), 0.0);
    }
}
