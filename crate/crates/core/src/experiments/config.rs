//! TOML run configuration shared by the command-line tool and the examples.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;

use crate::duhamel::{solve_fixed_point_with, FixedPointOptions, Model, Quadrature};
use crate::error::{Error, Result};
use crate::experiments::data::DataSpec;
use crate::experiments::dispersive::{exp_dispersive, DecayNorm, DispersiveParams};
use crate::experiments::fit::geometric_times;
use crate::experiments::leibniz::{exp_leibniz, LeibnizParams};
use crate::experiments::report::{Check, ExperimentOutput};
use crate::experiments::scattering::{exp_scattering, ScatterParams};
use crate::experiments::selfsim::{exp_selfsim, SelfSimParams};
use crate::experiments::stability::{exp_stability, StabilityParams};
use crate::grid::Grid;
use crate::lorentz::{sobolev_lorentz_norm, weak_lp_norm, weak_lp_quasinorm};
use crate::params::{derive_exponents, smallness_budget, ModelConfig};
use crate::reference::{evolve_model, EvolveSpec};
use crate::spectral::{DispersionSymbol, MultiplierSpec, SymbolKind};

/// Environment variable that replaces the `seed` key.
pub const SEED_ENV: &str = "DISPERSOLVE_SEED";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub model: ModelSection,
    #[serde(default)]
    pub grid: Option<GridSection>,
    #[serde(default)]
    pub data: Option<DataSpec>,
    #[serde(default)]
    pub evolve: Option<EvolveSection>,
    #[serde(default)]
    pub picard: Option<PicardSection>,
    #[serde(default)]
    pub norms: Option<NormsSection>,
    #[serde(default)]
    pub budget: Option<BudgetSection>,
    #[serde(default)]
    pub experiment: Option<ExperimentSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub n: usize,
    pub alpha: f64,
    pub gamma: f64,
    #[serde(default = "one")]
    pub a: f64,
    #[serde(default)]
    pub a_im: f64,
    #[serde(default)]
    pub b: f64,
    #[serde(default)]
    pub b_im: f64,
    #[serde(default)]
    pub symbol: Option<SymbolSection>,
    #[serde(default)]
    pub multiplier: Option<MultiplierSpec>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SymbolSection {
    #[serde(flatten)]
    pub kind: SymbolKind,
    #[serde(default)]
    pub degree: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub sizes: Vec<usize>,
    pub extents: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSection {
    pub t_final: f64,
    pub dt: f64,
    #[serde(default)]
    pub dt_growth: f64,
    #[serde(default)]
    pub dealias: bool,
    /// Explicit snapshot times; defaults to `snapshot_count` uniform samples.
    #[serde(default)]
    pub snapshots: Option<Vec<f64>>,
    #[serde(default = "default_snapshot_count")]
    pub snapshot_count: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PicardSection {
    pub t_final: f64,
    #[serde(default = "default_nt")]
    pub nt: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub trapezoid: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormsSection {
    pub p: Vec<f64>,
    #[serde(default)]
    pub s: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSection {
    pub m: f64,
    pub rho: f64,
    #[serde(default = "one")]
    pub c_disp: f64,
}

/// Geometric sample window shared by the fitted experiments.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    #[serde(default = "default_fit_lo")]
    pub lo: f64,
    #[serde(default = "default_fit_hi")]
    pub hi: f64,
    #[serde(default = "default_fit_count")]
    pub count: usize,
}

impl Default for Window {
    fn default() -> Self {
        Window { lo: default_fit_lo(), hi: default_fit_hi(), count: default_fit_count() }
    }
}

impl Window {
    pub fn times(&self) -> Vec<f64> {
        geometric_times(self.lo, self.hi, self.count)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExperimentSection {
    Dispersive {
        #[serde(default)]
        window: Window,
        /// Data exponent; absent means the sup-norm surrogate.
        #[serde(default)]
        p: Option<f64>,
        #[serde(default = "default_dispersive_tol")]
        slope_tolerance: f64,
    },
    Scatter {
        #[serde(default)]
        window: Window,
        #[serde(default = "default_t_max")]
        t_max: f64,
        #[serde(default = "default_late_count")]
        late_count: usize,
        #[serde(default = "default_dt")]
        dt: f64,
        #[serde(default = "default_dt_growth")]
        dt_growth: f64,
        #[serde(default = "default_twenty_percent")]
        slope_tolerance: f64,
        #[serde(default = "default_tail_limit")]
        tail_ratio_limit: f64,
    },
    Selfsim {
        #[serde(default = "default_lambda")]
        lambda: usize,
        #[serde(default = "default_selfsim_t")]
        t: f64,
        #[serde(default = "default_mismatch_tol")]
        mismatch_tolerance: f64,
        #[serde(default = "default_first_iterate_nt")]
        first_iterate_nt: usize,
        #[serde(default = "default_omega_sigma")]
        omega_sigma: f64,
        #[serde(default = "one")]
        omega_amplitude: f64,
        #[serde(default)]
        window: Window,
        #[serde(default = "default_selfsim_slope_tol")]
        slope_tolerance: f64,
    },
    Stability {
        /// Added to the base data to form the second initial state.
        perturbation: DataSpec,
        /// Defaults to beta.
        #[serde(default)]
        mu: Option<f64>,
        #[serde(default)]
        window: Window,
        #[serde(default = "default_dt")]
        dt: f64,
        #[serde(default = "default_dt_growth")]
        dt_growth: f64,
        #[serde(default = "default_slack")]
        slack: f64,
    },
    Leibniz {
        #[serde(default = "default_family_size")]
        family_size: usize,
        #[serde(default = "default_modes")]
        modes: usize,
        #[serde(default = "one")]
        amplitude: f64,
        /// Defaults to the derived `s`.
        #[serde(default)]
        s: Option<f64>,
        #[serde(default = "default_scale_tol")]
        scale_tolerance: f64,
        #[serde(default = "default_twenty_percent")]
        refinement_tolerance: f64,
    },
}

impl ExperimentSection {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentSection::Dispersive { .. } => "dispersive",
            ExperimentSection::Scatter { .. } => "scatter",
            ExperimentSection::Selfsim { .. } => "selfsim",
            ExperimentSection::Stability { .. } => "stability",
            ExperimentSection::Leibniz { .. } => "leibniz",
        }
    }
}

fn one() -> f64 {
    1.0
}
fn default_snapshot_count() -> usize {
    11
}
fn default_nt() -> usize {
    65
}
fn default_tol() -> f64 {
    1e-10
}
fn default_max_iter() -> usize {
    60
}
fn default_fit_lo() -> f64 {
    4.0
}
fn default_fit_hi() -> f64 {
    64.0
}
fn default_fit_count() -> usize {
    16
}
fn default_dispersive_tol() -> f64 {
    0.05
}
fn default_t_max() -> f64 {
    1024.0
}
fn default_late_count() -> usize {
    13
}
fn default_dt() -> f64 {
    0.05
}
fn default_dt_growth() -> f64 {
    0.02
}
fn default_twenty_percent() -> f64 {
    0.2
}
fn default_tail_limit() -> f64 {
    0.1
}
fn default_lambda() -> usize {
    2
}
fn default_selfsim_t() -> f64 {
    3.0
}
fn default_mismatch_tol() -> f64 {
    0.02
}
fn default_first_iterate_nt() -> usize {
    17
}
fn default_omega_sigma() -> f64 {
    1.5
}
fn default_selfsim_slope_tol() -> f64 {
    0.15
}
fn default_slack() -> f64 {
    0.1
}
fn default_family_size() -> usize {
    50
}
fn default_modes() -> usize {
    4
}
fn default_scale_tol() -> f64 {
    0.01
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Applies `DISPERSOLVE_SEED` when it is set.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed = v.trim().parse().map_err(|_| Error::Config(format!("{SEED_ENV}={v} is not an integer")))?;
        }
        Ok(())
    }

    pub fn model_config(&self) -> Result<ModelConfig> {
        let m = &self.model;
        let symbol = match &m.symbol {
            None => DispersionSymbol::laplacian(),
            Some(s) => {
                let sym = DispersionSymbol::new(s.kind.clone());
                match s.degree {
                    Some(d) => sym.with_degree(d),
                    None => sym,
                }
            }
        };
        let cfg = ModelConfig {
            n: m.n,
            symbol,
            multiplier: m.multiplier.clone().unwrap_or(MultiplierSpec::Identity),
            a: Complex64::new(m.a, m.a_im),
            b: Complex64::new(m.b, m.b_im),
            alpha: m.alpha,
            gamma: m.gamma,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn grid(&self) -> Result<Grid> {
        let g = self.grid.as_ref().ok_or_else(|| Error::Config("missing [grid] section".into()))?;
        if g.sizes.len() != self.model.n {
            return Err(Error::Config(format!("grid has {} axes but n = {}", g.sizes.len(), self.model.n)));
        }
        Grid::new(&g.sizes, &g.extents).map_err(|e| Error::Config(e.to_string()))
    }

    /// Initial data with random seeds filled from the run seed.
    pub fn data(&self, grid: &Grid) -> Result<crate::grid::Field> {
        let spec = self.data.as_ref().ok_or_else(|| Error::Config("missing [data] section".into()))?;
        self.seeded(spec).build(grid)
    }

    fn seeded(&self, spec: &DataSpec) -> DataSpec {
        match spec {
            DataSpec::Random { amplitude, modes, seed: None } => {
                DataSpec::Random { amplitude: *amplitude, modes: *modes, seed: Some(self.seed) }
            }
            other => other.clone(),
        }
    }

    /// Checks everything that can be checked without running.
    pub fn validate(&self) -> Result<()> {
        let cfg = self.model_config()?;
        if self.grid.is_some() {
            let grid = self.grid()?;
            if self.data.is_some() {
                self.data(&grid)?;
            }
        }
        if let Some(ev) = &self.evolve {
            self.evolve_spec(ev).validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        if let Some(ExperimentSection::Dispersive { p: Some(p), .. }) = &self.experiment {
            if !(*p > 1.0 && *p < 2.0) {
                return Err(Error::Config(format!("dispersive p = {p} must lie in (1, 2)")));
            }
        }
        let _ = cfg;
        Ok(())
    }

    fn evolve_spec(&self, ev: &EvolveSection) -> EvolveSpec {
        let snaps = match &ev.snapshots {
            Some(s) => s.clone(),
            None => {
                let k = ev.snapshot_count.max(2);
                (0..k).map(|i| ev.t_final * i as f64 / (k - 1) as f64).collect()
            }
        };
        let mut spec = EvolveSpec::new(ev.t_final, ev.dt, snaps).with_growth(ev.dt_growth);
        spec.dealias = ev.dealias;
        spec
    }
}

/// Derived exponents, admissibility flags and, with a `[budget]` section, the smallness budget.
pub fn run_check_model(cfg_file: &ExperimentConfig) -> Result<ExperimentOutput> {
    let cfg = cfg_file.model_config()?;
    let dp = derive_exponents(&cfg)?;
    let mut out = ExperimentOutput::new(&["s", "beta", "delta", "kappa", "identity_beta_residual", "identity_delta_residual"]);
    out.push_row(vec![dp.s, dp.beta, dp.delta, dp.kappa, dp.identity_beta_residual, dp.identity_delta_residual]);
    for f in &dp.admissibility.flags {
        let state = if !f.applicable {
            "n/a".to_string()
        } else {
            format!("{} (margin {:e})", f.holds, f.margin)
        };
        out.note(f.name, state);
    }
    if let Some(r) = dp.generalized_ds_constraint {
        out.note("generalized_ds_residual", r);
    }
    out.note("admissible", dp.admissible());
    if let Some(b) = &cfg_file.budget {
        let rep = smallness_budget(&cfg, &dp, b.m, b.rho, b.c_disp)?;
        for q in &rep.inequalities {
            out.note(q.name, format!("{} (lhs {:e}, rhs {:e})", q.satisfied, q.lhs, q.rhs));
        }
        out.note("k0", rep.k0);
    }
    Ok(out)
}

/// Weak-Lp quasi-norm and norm of the configured data, and the Sobolev-Lorentz norm when `s` is given.
pub fn run_norms(cfg_file: &ExperimentConfig) -> Result<ExperimentOutput> {
    let grid = cfg_file.grid()?;
    let u = cfg_file.data(&grid)?;
    let sec = cfg_file.norms.as_ref().ok_or_else(|| Error::Config("missing [norms] section".into()))?;
    let mut out = ExperimentOutput::new(&["p", "quasi_norm", "norm", "sobolev_lorentz"]);
    for &p in &sec.p {
        if !(p > 1.0) {
            return Err(Error::Config(format!("norm exponent p = {p} must exceed 1")));
        }
        let sl = match sec.s {
            Some(s) => sobolev_lorentz_norm(&u, s, p)?,
            None => f64::NAN,
        };
        out.push_row(vec![p, weak_lp_quasinorm(&u, p)?, weak_lp_norm(&u, p)?.norm, sl]);
    }
    out.note("l2_norm", u.l2_norm());
    out.note("max_abs", u.max_abs());
    Ok(out)
}

/// Splitting run from the configured data; records mass and weak norms per snapshot.
pub fn run_evolve(cfg_file: &ExperimentConfig) -> Result<ExperimentOutput> {
    let cfg = cfg_file.model_config()?;
    let grid = cfg_file.grid()?;
    let u0 = cfg_file.data(&grid)?;
    let ev = cfg_file.evolve.as_ref().ok_or_else(|| Error::Config("missing [evolve] section".into()))?;
    let spec = cfg_file.evolve_spec(ev);
    let model = Model::new(&cfg, &grid)?.with_dealias(ev.dealias);
    let tr = evolve_model(&model, &u0, &spec)?;
    let p = cfg.alpha + 2.0;
    let mut out = ExperimentOutput::new(&["t", "mass", "max_abs", "weak_norm"]);
    for (t, f) in tr.times.iter().zip(&tr.fields) {
        out.push_row(vec![*t, f.l2_norm().powi(2), f.max_abs(), weak_lp_norm(f, p)?.norm]);
    }
    let m0 = u0.l2_norm().powi(2);
    let m1 = tr.last().l2_norm().powi(2);
    out.note("mass_drift", ((m1 - m0) / m0).abs());
    Ok(out)
}

/// Picard iteration on a uniform time grid; one row per iterate.
pub fn run_picard(cfg_file: &ExperimentConfig) -> Result<ExperimentOutput> {
    let cfg = cfg_file.model_config()?;
    let grid = cfg_file.grid()?;
    let u0 = cfg_file.data(&grid)?;
    let sec = cfg_file.picard.as_ref().ok_or_else(|| Error::Config("missing [picard] section".into()))?;
    let model = Model::new(&cfg, &grid)?;
    let rule = if sec.trapezoid { Quadrature::Trapezoid } else { Quadrature::Simpson };
    let (_, rep) =
        solve_fixed_point_with(&model, &u0, sec.t_final, sec.nt, FixedPointOptions { tol: sec.tol, max_iter: sec.max_iter, rule })?;
    let mut out = ExperimentOutput::new(&["iteration", "distance", "ratio"]);
    for (k, d) in rep.distances.iter().enumerate() {
        let r = if k == 0 { f64::NAN } else { rep.ratios[k - 1] };
        out.push_row(vec![(k + 1) as f64, *d, r]);
    }
    out.note("converged", rep.converged);
    out.note("norm_beta", rep.norm_beta);
    out.checks.push(Check::at_most("contraction_ratio", rep.max_ratio(), 1.0 - f64::EPSILON));
    Ok(out)
}

pub fn run_experiment(cfg_file: &ExperimentConfig) -> Result<ExperimentOutput> {
    let exp = cfg_file.experiment.as_ref().ok_or_else(|| Error::Config("missing [experiment] section".into()))?;
    let cfg = cfg_file.model_config()?;
    let grid = cfg_file.grid()?;
    match exp {
        ExperimentSection::Dispersive { window, p, slope_tolerance } => {
            let u0 = cfg_file.data(&grid)?;
            let norm = match p {
                None => DecayNorm::Sup,
                Some(p) => DecayNorm::WeakLp { p: *p },
            };
            let params = DispersiveParams { times: window.times(), norm, slope_tolerance: *slope_tolerance };
            Ok(exp_dispersive(&cfg.symbol, &u0, &params)?.output())
        }
        ExperimentSection::Scatter { window, t_max, late_count, dt, dt_growth, slope_tolerance, tail_ratio_limit } => {
            let u0 = cfg_file.data(&grid)?;
            let params = ScatterParams {
                fit_times: window.times(),
                t_max: *t_max,
                late_count: *late_count,
                dt: *dt,
                dt_growth: *dt_growth,
                slope_tolerance: *slope_tolerance,
                tail_ratio_limit: *tail_ratio_limit,
            };
            Ok(exp_scattering(&Model::new(&cfg, &grid)?, &u0, &params)?.output())
        }
        ExperimentSection::Selfsim {
            lambda,
            t,
            mismatch_tolerance,
            first_iterate_nt,
            omega_sigma,
            omega_amplitude,
            window,
            slope_tolerance,
        } => {
            let params = SelfSimParams {
                lambda: *lambda,
                t: *t,
                mismatch_tolerance: *mismatch_tolerance,
                first_iterate_nt: *first_iterate_nt,
                omega_sigma: *omega_sigma,
                omega_amplitude: *omega_amplitude,
                fit_times: window.times(),
                slope_tolerance: *slope_tolerance,
            };
            Ok(exp_selfsim(&cfg, &grid, &params)?.output())
        }
        ExperimentSection::Stability { perturbation, mu, window, dt, dt_growth, slack } => {
            let u0 = cfg_file.data(&grid)?;
            let v0 = &u0 + &cfg_file.seeded(perturbation).build(&grid)?;
            let dp = derive_exponents(&cfg)?;
            let params = StabilityParams {
                mu: mu.unwrap_or(dp.beta),
                fit_times: window.times(),
                dt: *dt,
                dt_growth: *dt_growth,
                slack: *slack,
            };
            Ok(exp_stability(&Model::new(&cfg, &grid)?, &u0, &v0, &params)?.output())
        }
        ExperimentSection::Leibniz { family_size, modes, amplitude, s, scale_tolerance, refinement_tolerance } => {
            let g = cfg_file.grid.as_ref().expect("grid checked above");
            if g.sizes.windows(2).any(|w| w[0] != w[1]) || g.extents.windows(2).any(|w| w[0] != w[1]) {
                return Err(Error::Config("the Leibniz study needs a cubic grid".into()));
            }
            let s = match s {
                Some(s) => *s,
                None => derive_exponents(&cfg)?.s,
            };
            let params = LeibnizParams {
                dim: cfg.n,
                size: g.sizes[0],
                extent: g.extents[0],
                family_size: *family_size,
                modes: *modes,
                amplitude: *amplitude,
                seed: cfg_file.seed,
                s,
                alpha: cfg.alpha,
                gamma: cfg.gamma,
                scale_tolerance: *scale_tolerance,
                refinement_tolerance: *refinement_tolerance,
            };
            Ok(exp_leibniz(&params)?.output())
        }
    }
}
