//! Model configuration, derived exponents, admissibility and smallness budget.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::spectral::{DispersionSymbol, MultiplierSpec};

/// One instance of `i u_t + L u = a |u|^alpha u + b E(|u|^gamma) u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub n: usize,
    pub symbol: DispersionSymbol,
    pub multiplier: MultiplierSpec,
    pub a: Complex64,
    pub b: Complex64,
    pub alpha: f64,
    pub gamma: f64,
}

impl ModelConfig {
    pub fn new(n: usize, symbol: DispersionSymbol, multiplier: MultiplierSpec, a: f64, b: f64, alpha: f64, gamma: f64) -> Self {
        ModelConfig { n, symbol, multiplier, a: Complex64::new(a, 0.0), b: Complex64::new(b, 0.0), alpha, gamma }
    }

    /// Laplacian, identity multiplier.
    pub fn nls(n: usize, a: f64, b: f64, alpha: f64, gamma: f64) -> Self {
        Self::new(n, DispersionSymbol::laplacian(), MultiplierSpec::Identity, a, b, alpha, gamma)
    }

    pub fn d(&self) -> f64 {
        self.symbol.degree
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.n) {
            return Err(Error::Config(format!("dimension {} not in 1..=3", self.n)));
        }
        for (what, ar) in [("symbol", self.symbol.arity()), ("multiplier", self.multiplier.arity())] {
            if let Some(k) = ar {
                if k != self.n {
                    return Err(Error::Config(format!("{what} requires n = {k}, got n = {}", self.n)));
                }
            }
        }
        if !(self.alpha > 0.0 && self.gamma > 0.0 && self.alpha.is_finite() && self.gamma.is_finite()) {
            return Err(Error::Config("alpha and gamma must be positive".into()));
        }
        if !(self.d() > 0.0) {
            return Err(Error::Config("symbol degree must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Flag {
    pub name: &'static str,
    pub holds: bool,
    /// Distance to the boundary of the condition; negative when violated.
    pub margin: f64,
    pub applicable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Admissibility {
    pub flags: Vec<Flag>,
}

impl Admissibility {
    pub fn all_hold(&self) -> bool {
        self.flags.iter().all(|f| f.holds)
    }

    pub fn get(&self, name: &str) -> Option<&Flag> {
        self.flags.iter().find(|f| f.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivedParams {
    pub n: usize,
    pub d: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub s: f64,
    pub beta: f64,
    pub delta: f64,
    /// `n alpha / (d (alpha + 2))`, the time exponent of the dispersive estimate.
    pub kappa: f64,
    /// Decay exponent for the weak-norm bound on the solution, defaults to `beta`.
    pub mu: f64,
    /// Decay exponent for the Sobolev–Lorentz bound, defaults to `delta`.
    pub nu: f64,
    /// `alpha beta + kappa - 1`
    pub identity_beta_residual: f64,
    /// `gamma delta + kappa - 1`
    pub identity_delta_residual: f64,
    pub admissibility: Admissibility,
    pub generalized_ds_constraint: Option<f64>,
}

impl DerivedParams {
    pub fn admissible(&self) -> bool {
        self.admissibility.all_hold()
    }

    pub fn with_decay(mut self, mu: f64, nu: f64) -> Self {
        self.mu = mu;
        self.nu = nu;
        self
    }

    /// Weak-norm exponent `alpha + 2`.
    pub fn p(&self) -> f64 {
        self.alpha + 2.0
    }

    /// Exponent predicted for `t^beta ||U(t) w||` with `w` in the dual weak space.
    pub fn perturbation_rate(&self) -> f64 {
        self.beta - self.kappa
    }
}

/// `1/alpha - n / (d (alpha + 2))`; needs no `gamma`, so it is also
/// available for single-power models.
pub fn beta_exponent(n: usize, d: f64, alpha: f64) -> f64 {
    1.0 / alpha - n as f64 / (d * (alpha + 2.0))
}

fn exponents(n: f64, d: f64, alpha: f64, gamma: f64) -> (f64, f64, f64, f64) {
    let s = n * (gamma - alpha) / (gamma * (alpha + 2.0));
    let beta = 1.0 / alpha - n / (d * (alpha + 2.0));
    let delta = 1.0 / gamma + s / d - n / (d * (alpha + 2.0));
    let kappa = n * alpha / (d * (alpha + 2.0));
    (s, beta, delta, kappa)
}

pub fn derive_exponents(cfg: &ModelConfig) -> Result<DerivedParams> {
    cfg.validate()?;
    let (alpha, gamma) = (cfg.alpha, cfg.gamma);
    if gamma <= alpha.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "gamma = {gamma} must exceed max(1, alpha) = {}",
            alpha.max(1.0)
        )));
    }
    let d = cfg.d();
    let (s, beta, delta, kappa) = exponents(cfg.n as f64, d, alpha, gamma);
    let mut dp = DerivedParams {
        n: cfg.n,
        d,
        alpha,
        gamma,
        s,
        beta,
        delta,
        kappa,
        mu: beta,
        nu: delta,
        identity_beta_residual: alpha * beta + kappa - 1.0,
        identity_delta_residual: gamma * delta + kappa - 1.0,
        admissibility: Admissibility { flags: Vec::new() },
        generalized_ds_constraint: cfg.multiplier.constraint_residual(),
    };
    dp.admissibility = check_admissibility(cfg, &dp);
    Ok(dp)
}

fn lt(name: &'static str, lhs: f64, rhs: f64) -> Flag {
    Flag { name, holds: lhs < rhs, margin: rhs - lhs, applicable: true }
}

pub fn check_admissibility(cfg: &ModelConfig, dp: &DerivedParams) -> Admissibility {
    let (n, d, a, g) = (cfg.n as f64, dp.d, dp.alpha, dp.gamma);
    let (s, b, de) = (dp.s, dp.beta, dp.delta);
    let ratio = n * a / d;
    let mut flags = vec![
        Flag { name: "s_in_unit_interval", holds: s > 0.0 && s < 1.0, margin: s.min(1.0 - s), applicable: true },
        Flag {
            name: "n_alpha_over_d_range",
            holds: (a + 2.0) / (a + 1.0) < ratio && ratio < a + 2.0,
            margin: (ratio - (a + 2.0) / (a + 1.0)).min(a + 2.0 - ratio),
            applicable: true,
        },
        Flag { name: "beta_positive", holds: b > 0.0, margin: b, applicable: true },
        Flag { name: "delta_positive", holds: de > 0.0, margin: de, applicable: true },
        lt("beta_alpha_plus_one", b * (a + 1.0), 1.0),
        lt("gamma_delta_plus_beta", g * de + b, 1.0),
        lt("delta_gamma_plus_one", de * (g + 1.0), 1.0),
        lt("alpha_beta_plus_delta", a * b + de, 1.0),
    ];
    let mut high = lt("high_dimension_alpha", (n - 2.0) * g / (g + n), a);
    if cfg.n < 3 {
        high.holds = true;
        high.applicable = false;
    }
    flags.push(high);
    if let Some(r) = cfg.multiplier.constraint_residual() {
        flags.push(Flag {
            name: "generalized_ds_constraint",
            holds: r.abs() <= 1e-12,
            margin: -r.abs(),
            applicable: true,
        });
    }
    Admissibility { flags }
}

/// `int_0^1 (1-z)^{-a} z^{-b} dz = Gamma(1-a) Gamma(1-b) / Gamma(2-a-b)`.
pub fn beta_integral(aexp: f64, bexp: f64) -> Result<f64> {
    if !(aexp < 1.0) {
        return Err(Error::Divergent { name: "aexp", value: aexp });
    }
    if !(bexp < 1.0) {
        return Err(Error::Divergent { name: "bexp", value: bexp });
    }
    let (x, y) = (1.0 - aexp, 1.0 - bexp);
    Ok((ln_gamma(x) + ln_gamma(y) - ln_gamma(x + y)).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inequality {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    /// `rhs - lhs`
    pub slack: f64,
}

fn ineq(name: &'static str, lhs: f64, rhs: f64, strict: bool) -> Inequality {
    let satisfied = if strict { lhs < rhs } else { lhs <= rhs };
    Inequality { name, lhs, rhs, satisfied, slack: rhs - lhs }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetReport {
    /// Beta-integral factors `B_1..B_8`.
    pub b_factors: [f64; 8],
    /// `C_i = C_disp B_i`.
    pub c: [f64; 8],
    pub inequalities: Vec<Inequality>,
    /// Contraction bound `|a| C_1 M^alpha + |b| C_2 M^gamma`.
    pub k0: f64,
    /// Radius `rho / (1 - (|a| C_5 M^alpha + |b| C_6 M^gamma))` for the weak-norm decay, if finite.
    pub k_mu: Option<f64>,
    /// Same with `C_7, C_8` for the Sobolev–Lorentz decay.
    pub k_nu: Option<f64>,
}

impl BudgetReport {
    pub fn get(&self, name: &str) -> Option<&Inequality> {
        self.inequalities.iter().find(|i| i.name == name)
    }
}

pub fn smallness_budget(cfg: &ModelConfig, dp: &DerivedParams, m: f64, rho: f64, c_disp: f64) -> Result<BudgetReport> {
    for (what, v) in [("M", m), ("rho", rho), ("C_disp", c_disp)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidArgument(format!("{what} = {v} must be positive")));
        }
    }
    let (al, ga, be, de) = (dp.alpha, dp.gamma, dp.beta, dp.delta);
    let bexps = [
        (al + 1.0) * be,
        be + ga * de,
        al * be + de,
        de * (ga + 1.0),
        al * be + dp.mu,
        ga * de + dp.mu,
        al * be + dp.nu,
        ga * de + dp.nu,
    ];
    let mut b_factors = [0.0; 8];
    for (i, &e) in bexps.iter().enumerate() {
        b_factors[i] = beta_integral(dp.kappa, e)?;
    }
    let c = b_factors.map(|b| c_disp * b);
    let (aa, bb) = (cfg.a.norm(), cfg.b.norm());
    let (ma, mg) = (m.powf(al), m.powf(ga));
    let k0 = aa * c[0] * ma + bb * c[1] * mg;
    let q56 = aa * c[4] * ma + bb * c[5] * mg;
    let q78 = aa * c[6] * ma + bb * c[7] * mg;
    let inequalities = vec![
        ineq("weak_norm_ball", rho + aa * c[0] * ma * m + bb * c[1] * mg * m, m, false),
        ineq("sobolev_ball", rho + aa * c[2] * ma * m + bb * c[3] * mg * m, m, false),
        ineq("contraction", k0, 1.0, true),
        ineq("decay_mu", q56, 1.0, true),
        ineq("decay_nu", q78, 1.0, true),
    ];
    let radius = |q: f64| if q < 1.0 { Some(rho / (1.0 - q)) } else { None };
    Ok(BudgetReport { b_factors, c, inequalities, k0, k_mu: radius(q56), k_nu: radius(q78) })
}
