//! The rescaled sign field `s(v) = c1 sqrt(G(v,v)) sign(phi(v))` and the
//! Gaussian sign-correlation formulas behind its convergence to the GFF.

use std::f64::consts::FRAC_2_PI;
use std::io::{self, Write};
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::ensemble::{Ensemble, Stream};
use crate::error::{Error, Result};
use crate::lattice::{Field, GreenOperator, LatticeDomain};
use crate::stats::{Estimate, Welford};

/// `c1 = sqrt(pi/2)`, chosen so that `E[phi(v) s(w)] = G(v, w)`.
pub const C1: f64 = 1.253_314_137_315_500_1;

fn check_rho(rho: f64) -> Result<()> {
    if (-1.0..=1.0).contains(&rho) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("correlation {rho} outside [-1, 1]")))
    }
}

/// `E[sign X sign Y] = (2/pi) arcsin rho` for a standard Gaussian pair.
pub fn sign_correlation_exact(rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(FRAC_2_PI * rho.asin())
}

/// `E[X sign Y] = sqrt(2/pi) rho` for a standard Gaussian pair.
pub fn cross_moment_exact(rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(FRAC_2_PI.sqrt() * rho)
}

#[derive(Debug, Clone)]
pub struct SpinField {
    domain: Arc<LatticeDomain>,
    values: Vec<f64>,
}

impl SpinField {
    pub fn domain(&self) -> &Arc<LatticeDomain> {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn to_field(&self) -> Field {
        Field::new(self.domain.clone(), self.values.clone()).expect("same domain")
    }
}

pub fn rescaled_sign_field(field: &Field, green: &GreenOperator) -> Result<SpinField> {
    if !field.same_domain(green.domain()) {
        return Err(Error::DomainMismatch);
    }
    let values = field
        .values()
        .iter()
        .zip(green.diagonal())
        .map(|(&x, &g)| if x == 0.0 { 0.0 } else { C1 * g.sqrt() * x.signum() })
        .collect();
    Ok(SpinField { domain: field.domain().clone(), values })
}

/// Monte Carlo `E[(phi - s, f)^2]` over replicas `0..samples`.
pub fn spin_discrepancy(ensemble: &Ensemble, f: &[f64], samples: usize) -> Result<Estimate> {
    if samples < 2 {
        return Err(Error::InvalidParameter("spin discrepancy needs at least two replicas".into()));
    }
    let green = ensemble.green();
    if f.len() != green.domain().num_interior() {
        return Err(Error::DomainMismatch);
    }
    let mut acc = Welford::default();
    for r in 0..samples as u64 {
        let field = ensemble.field(r);
        let s = rescaled_sign_field(&field, green)?;
        let x = field.sub(&s.to_field())?.pair(f);
        acc.push(x * x);
    }
    Ok(acc.estimate())
}

/// Exact `E[(phi - s, f)^2] = h^4 sum_{v,w} f(v) f(w) sqrt(G(v,v) G(w,w))
/// (arcsin rho - rho)`. Needs every column of `G`: quadratic in the vertex
/// count.
pub fn spin_discrepancy_exact(green: &GreenOperator, f: &[f64]) -> Result<f64> {
    let domain = green.domain();
    let n = domain.num_interior();
    if f.len() != n {
        return Err(Error::DomainMismatch);
    }
    let diag = green.diagonal();
    let sd: Vec<f64> = diag.iter().map(|g| g.sqrt()).collect();
    let mut total = 0.0;
    for w in 0..n {
        if f[w] == 0.0 {
            continue;
        }
        let col = green.column(w)?;
        let mut s = 0.0;
        for v in 0..n {
            if f[v] == 0.0 {
                continue;
            }
            let scale = sd[v] * sd[w];
            let rho = (col[v] / scale).clamp(-1.0, 1.0);
            s += f[v] * scale * (rho.asin() - rho);
        }
        total += f[w] * s;
    }
    let h = domain.mesh();
    Ok(h.powi(4) * total)
}

/// Empirical Gaussian moment against its closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub rho: f64,
    pub empirical: f64,
    pub exact: f64,
    pub se: f64,
    pub samples: usize,
}

impl IdentityCheck {
    /// `(empirical - exact) / se`; zero when both the gap and `se` vanish.
    pub fn z(&self) -> f64 {
        let d = self.empirical - self.exact;
        if d == 0.0 {
            0.0
        } else {
            d / self.se
        }
    }
}

fn gaussian_pair<R: Rng + ?Sized>(rho: f64, rng: &mut R) -> (f64, f64) {
    let x: f64 = rng.sample(StandardNormal);
    let z: f64 = rng.sample(StandardNormal);
    (x, rho * x + (1.0 - rho * rho).max(0.0).sqrt() * z)
}

/// Monte Carlo `E[sign X sign Y]` for a standard pair with correlation `rho`.
pub fn sign_correlation_mc<R: Rng + ?Sized>(rho: f64, samples: usize, rng: &mut R) -> Result<IdentityCheck> {
    let exact = sign_correlation_exact(rho)?;
    let mut acc = Welford::default();
    for _ in 0..samples {
        let (x, y) = gaussian_pair(rho, rng);
        acc.push(x.signum() * y.signum());
    }
    let e = acc.estimate();
    Ok(IdentityCheck { rho, empirical: e.mean, exact, se: e.se, samples })
}

/// Monte Carlo `E[X sign Y]` for a standard pair with correlation `rho`.
pub fn cross_moment_mc<R: Rng + ?Sized>(rho: f64, samples: usize, rng: &mut R) -> Result<IdentityCheck> {
    let exact = cross_moment_exact(rho)?;
    let mut acc = Welford::default();
    for _ in 0..samples {
        let (x, y) = gaussian_pair(rho, rng);
        acc.push(x * y.signum());
    }
    let e = acc.estimate();
    Ok(IdentityCheck { rho, empirical: e.mean, exact, se: e.se, samples })
}

/// Checks `E[sign phi(v) sign phi(w)] = (2/pi) arcsin rho(v, w)` for the
/// lattice field. The pair `(phi(v), phi(w))` is drawn directly from its exact
/// bivariate law, which is the marginal of a full field sample.
pub fn sign_covariance_identity_check(
    green: &GreenOperator,
    v: usize,
    w: usize,
    samples: usize,
    seed: u64,
) -> Result<IdentityCheck> {
    if v == w {
        return Err(Error::InvalidParameter("sign covariance check needs two distinct vertices".into()));
    }
    let gvw = green.green(v, w)?;
    let diag = green.diagonal();
    let rho = (gvw / (diag[v] * diag[w]).sqrt()).clamp(-1.0, 1.0);
    let mut rng = crate::ensemble::stream_rng(seed, 0, Stream::Auxiliary);
    sign_correlation_mc(rho, samples, &mut rng)
}

/// Asymptotic check `|(2/pi) arcsin rho - (2/pi) rho| <= |rho|^3` on `|rho| <= 0.3`.
pub fn small_rho_bound_holds(rho: f64) -> bool {
    (FRAC_2_PI * (rho.asin() - rho)).abs() <= rho.abs().powi(3)
}

pub const CSV_HEADER: &str = "n,f_name,M,discrepancy,se,deterministic_value";

pub fn write_csv_row<W: Write>(
    out: &mut W,
    n: u32,
    f_name: &str,
    est: &Estimate,
    exact: Option<f64>,
) -> io::Result<()> {
    let exact = exact.map_or(String::new(), |x| x.to_string());
    writeln!(out, "{n},{f_name},{},{},{},{exact}", est.count, est.mean, est.se)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::DomainShape;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constants_and_formulas() {
        assert_eq!(C1, (std::f64::consts::PI / 2.0).sqrt());
        assert_eq!(sign_correlation_exact(0.0).unwrap(), 0.0);
        assert!((sign_correlation_exact(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((sign_correlation_exact(0.5).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(sign_correlation_exact(1.5).is_err());
        assert_eq!(cross_moment_exact(0.0).unwrap(), 0.0);
        assert!((cross_moment_exact(0.3).unwrap() - 0.239_365).abs() < 1e-6);
        assert!(cross_moment_exact(-1.01).is_err());
    }

    #[test]
    fn e_abs_y_by_quadrature() {
        // oracle for cross_moment_exact(1): E|Y| by the trapezoid rule
        let (n, l) = (200_000, 12.0);
        let dx = 2.0 * l / n as f64;
        let q: f64 = (0..=n)
            .map(|k| {
                let y = -l + k as f64 * dx;
                let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                w * y.abs() * (-y * y / 2.0).exp()
            })
            .sum::<f64>()
            * dx
            / (2.0 * std::f64::consts::PI).sqrt();
        assert!((cross_moment_exact(1.0).unwrap() - q).abs() < 1e-8);
    }

    #[test]
    fn sign_correlation_shape() {
        let grid: Vec<f64> = (-20..=20).map(|k| k as f64 / 20.0).collect();
        for w in grid.windows(2) {
            assert!(sign_correlation_exact(w[0]).unwrap() < sign_correlation_exact(w[1]).unwrap());
        }
        for &r in &grid {
            let a = sign_correlation_exact(r).unwrap();
            assert!((a + sign_correlation_exact(-r).unwrap()).abs() < 1e-15);
            if r.abs() <= 0.3 {
                assert!(small_rho_bound_holds(r));
            }
        }
    }

    #[test]
    fn cross_moment_monte_carlo() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = cross_moment_mc(0.3, 1_000_000, &mut rng).unwrap();
        assert!(c.z().abs() <= 3.0, "z = {}", c.z());
        let p = sign_correlation_mc(1.0, 1000, &mut rng).unwrap();
        assert_eq!((p.empirical, p.exact, p.z()), (1.0, 1.0, 0.0));
    }

    #[test]
    fn single_vertex_spin() {
        let s = DomainShape::square(0.5, (0.0, 0.0)).unwrap();
        let g = GreenOperator::new(Arc::new(LatticeDomain::build(&s, 2).unwrap())).unwrap();
        let f = Field::new(g.domain().clone(), vec![2.7]).unwrap();
        let sp = rescaled_sign_field(&f, &g).unwrap();
        assert!((sp.values()[0] - 0.626_657_068_657_750_1).abs() < 1e-12);
        let neg = rescaled_sign_field(&f.negated(), &g).unwrap();
        assert_eq!(neg.values()[0], -sp.values()[0]);
        let zero = rescaled_sign_field(&Field::zeros(g.domain().clone()), &g).unwrap();
        assert_eq!(zero.values()[0], 0.0);
    }

    #[test]
    fn discrepancy_zero_test_function_and_sign_flip() {
        let ens = Ensemble::standard(3, 8).unwrap();
        let n = ens.domain().num_interior();
        let e = spin_discrepancy(&ens, &vec![0.0; n], 10).unwrap();
        assert_eq!((e.mean, e.se), (0.0, 0.0));
        assert_eq!(spin_discrepancy_exact(ens.green(), &vec![0.0; n]).unwrap(), 0.0);
        let f = vec![1.0; n];
        let field = ens.field(0);
        let a = field.sub(&rescaled_sign_field(&field, ens.green()).unwrap().to_field()).unwrap().pair(&f);
        let m = field.negated();
        let b = m.sub(&rescaled_sign_field(&m, ens.green()).unwrap().to_field()).unwrap().pair(&f);
        assert!((a * a - b * b).abs() < 1e-14);
    }

    #[test]
    fn discrepancy_matches_closed_form_on_a_small_grid() {
        let ens = Ensemble::standard(3, 21).unwrap();
        let f = vec![1.0; ens.domain().num_interior()];
        let exact = spin_discrepancy_exact(ens.green(), &f).unwrap();
        let mc = spin_discrepancy(&ens, &f, 20_000).unwrap();
        assert!((mc.mean - exact).abs() <= 3.0 * mc.se, "{} +- {} vs {exact}", mc.mean, mc.se);
    }

    #[test]
    fn identity_check_on_lattice_pairs() {
        let g = GreenOperator::new(Arc::new(LatticeDomain::standard(3).unwrap())).unwrap();
        let c = sign_covariance_identity_check(&g, 0, 1, 200_000, 5).unwrap();
        assert!(c.rho > 0.0 && c.z().abs() <= 3.0);
        assert!(sign_covariance_identity_check(&g, 2, 2, 10, 5).is_err());
    }
}
