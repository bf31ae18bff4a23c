use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Degree-0 real Fourier multipliers used for the nonlocal term `E`.
///
/// Every symbol that is 0/0 at the zero mode is defined as 0 there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MultiplierSpec {
    Identity,
    /// `xi_1^2 / (xi_1^2 + m2 xi_2^2)`
    DaveyStewartson { m2: f64 },
    GeneralizedDs { lambda: f64, ell: f64, m2: f64, m3: f64 },
    /// `nu xi_2^2 / (xi_1^2 + xi_2^2)`; set to 0 on the `xi_3` axis as well.
    Shrira { nu: f64 },
    /// `(4 pi / 3) (2 xi_3^2 - xi_1^2 - xi_2^2) / |xi|^2`
    Dipolar,
}

impl MultiplierSpec {
    pub fn arity(&self) -> Option<usize> {
        match self {
            MultiplierSpec::DaveyStewartson { .. } | MultiplierSpec::GeneralizedDs { .. } => Some(2),
            MultiplierSpec::Shrira { .. } | MultiplierSpec::Dipolar => Some(3),
            MultiplierSpec::Identity => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MultiplierSpec::Identity => "identity",
            MultiplierSpec::DaveyStewartson { .. } => "davey_stewartson",
            MultiplierSpec::GeneralizedDs { .. } => "generalized_ds",
            MultiplierSpec::Shrira { .. } => "shrira",
            MultiplierSpec::Dipolar => "dipolar",
        }
    }

    pub fn eval(&self, xi: &[f64; 3]) -> f64 {
        let (x1, x2, x3) = (xi[0] * xi[0], xi[1] * xi[1], xi[2] * xi[2]);
        match *self {
            MultiplierSpec::Identity => 1.0,
            MultiplierSpec::DaveyStewartson { m2 } => ratio(x1, x1 + m2 * x2),
            MultiplierSpec::GeneralizedDs { lambda, ell, m2, m3 } => {
                let num = lambda * x1 * x1 + (1.0 + m2 - 2.0 * ell) * x1 * x2 + m3 * x2 * x2;
                ratio(num, (x1 + m2 * x2) * (lambda * x1 + m3 * x2))
            }
            MultiplierSpec::Shrira { nu } => nu * ratio(x2, x1 + x2),
            MultiplierSpec::Dipolar => 4.0 * PI / 3.0 * ratio(2.0 * x3 - x1 - x2, x1 + x2 + x3),
        }
    }

    /// `(lambda - 1)(m3 - m2) - ell^2`; zero when the generalized DS
    /// coefficients are compatible. `None` for other kinds.
    pub fn constraint_residual(&self) -> Option<f64> {
        match *self {
            MultiplierSpec::GeneralizedDs { lambda, ell, m2, m3 } => Some((lambda - 1.0) * (m3 - m2) - ell * ell),
            _ => None,
        }
    }

    pub fn constraint_satisfied(&self) -> bool {
        self.constraint_residual().is_none_or(|r| r.abs() <= 1e-12)
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 && num == 0.0 {
        0.0
    } else {
        num / den
    }
}
