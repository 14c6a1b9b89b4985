//! Named test functions used as integrands `f` in the measure pairings.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lattice::LatticeDomain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestFunction {
    /// `f = 1`.
    One,
    /// Indicator of the left half-plane `x < 0`.
    HalfPlane,
    /// Smooth bump `exp(1 - 1/(1 - (r/R)^2))` supported on the disk of radius 1/2.
    Bump,
    /// First Dirichlet eigenfunction of the domain's bounding rectangle.
    Eigen11,
}

impl TestFunction {
    pub const ALL: [TestFunction; 4] =
        [TestFunction::One, TestFunction::HalfPlane, TestFunction::Bump, TestFunction::Eigen11];

    pub fn name(self) -> &'static str {
        match self {
            TestFunction::One => "one",
            TestFunction::HalfPlane => "halfplane",
            TestFunction::Bump => "bump",
            TestFunction::Eigen11 => "eigen11",
        }
    }

    /// Values at the interior vertices of `domain`.
    pub fn sample(self, domain: &LatticeDomain) -> Vec<f64> {
        let (x0, y0, x1, y1) = match domain.shape() {
            Some(s) => s.bounding_box(),
            None => {
                let (o, w, h) = domain.grid_box();
                let m = domain.mesh();
                (o.i as f64 * m, o.j as f64 * m, (o.i + w as i32 - 1) as f64 * m, (o.j + h as i32 - 1) as f64 * m)
            }
        };
        (0..domain.num_interior())
            .map(|v| {
                let (x, y) = domain.position(v);
                match self {
                    TestFunction::One => 1.0,
                    TestFunction::HalfPlane => f64::from(u8::from(x < 0.0)),
                    TestFunction::Bump => {
                        let r2 = (x * x + y * y) / 0.25;
                        if r2 < 1.0 {
                            (1.0 - 1.0 / (1.0 - r2)).exp()
                        } else {
                            0.0
                        }
                    }
                    TestFunction::Eigen11 => {
                        (PI * (x - x0) / (x1 - x0)).sin() * (PI * (y - y0) / (y1 - y0)).sin()
                    }
                }
            })
            .collect()
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TestFunction::ALL
            .into_iter()
            .find(|t| t.name() == s.trim())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown test function `{s}`")))
    }
}
