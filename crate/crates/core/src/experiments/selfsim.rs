use num_complex::Complex64;

use crate::duhamel::{duhamel_integral, Model, Quadrature, SolutionTrace};
use crate::error::{Error, Result};
use crate::experiments::data::gaussian;
use crate::experiments::fit::{fit_decay_exponent, geometric_times, RateFit};
use crate::experiments::report::{Check, ExperimentOutput};
use crate::grid::{Field, Grid};
use crate::lorentz::weak_lp_norm;
use crate::params::{beta_exponent, ModelConfig};
use crate::spectral::{power_profile, OriginRule};

#[derive(Debug, Clone, PartialEq)]
pub struct SelfSimParams {
    /// Integer dilation factor, so that `lambda x` stays on the grid.
    pub lambda: usize,
    /// Comparison time for the unscaled solution.
    pub t: f64,
    pub mismatch_tolerance: f64,
    /// Samples per Duhamel trace for the first Picard iterate; 0 skips that check.
    pub first_iterate_nt: usize,
    pub omega_sigma: f64,
    pub omega_amplitude: f64,
    pub fit_times: Vec<f64>,
    pub slope_tolerance: f64,
}

impl Default for SelfSimParams {
    fn default() -> Self {
        SelfSimParams {
            lambda: 2,
            t: 3.0,
            mismatch_tolerance: 0.02,
            first_iterate_nt: 17,
            omega_sigma: 1.5,
            omega_amplitude: 1.0,
            fit_times: geometric_times(4.0, 64.0, 16),
            slope_tolerance: 0.15,
        }
    }
}

/// Comparison of `A(lambda x)` with `c B(x)` over the points where `lambda x`
/// lies in the central half of the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub relative: f64,
    /// Physical position `x` of the largest deviation.
    pub worst_at: [f64; 3],
    /// Largest deviation sits in the outer quarter of the comparison box.
    pub boundary_flag: bool,
}

pub fn scaling_mismatch(a: &Field, b: &Field, lambda: usize, factor: f64) -> Result<Mismatch> {
    a.check_same_grid(b)?;
    if lambda == 0 {
        return Err(Error::InvalidArgument("lambda must be a positive integer".into()));
    }
    let g = a.grid();
    let dim = g.dim();
    // index offsets m with |lambda m h| <= L/4
    let reach: Vec<i64> = (0..dim).map(|ax| (g.sizes()[ax] / (4 * lambda)) as i64).collect();
    let center: Vec<i64> = g.sizes().iter().map(|&n| (n / 2) as i64).collect();
    let count: usize = reach.iter().map(|r| (2 * r + 1) as usize).product();
    let (mut worst, mut worst_off, mut scale) = (0.0f64, [0i64; 3], 0.0f64);
    let mut ia = [0usize; 3];
    let mut ib = [0usize; 3];
    for flat in 0..count {
        let mut rem = flat;
        let mut off = [0i64; 3];
        for ax in 0..dim {
            let w = (2 * reach[ax] + 1) as usize;
            off[ax] = (rem % w) as i64 - reach[ax];
            rem /= w;
            ib[ax] = (center[ax] + off[ax]) as usize;
            ia[ax] = (center[ax] + lambda as i64 * off[ax]) as usize;
        }
        let bv = b.at(&ib[..dim]) * factor;
        let err = (a.at(&ia[..dim]) - bv).norm();
        scale = scale.max(bv.norm());
        if err > worst {
            worst = err;
            worst_off = off;
        }
    }
    let mut worst_at = [0.0; 3];
    let mut boundary_flag = false;
    for ax in 0..dim {
        worst_at[ax] = worst_off[ax] as f64 * g.spacing(ax);
        if 4 * worst_off[ax].abs() > 3 * reach[ax] {
            boundary_flag = true;
        }
    }
    let relative = if scale > 0.0 { worst / scale } else { 0.0 };
    Ok(Mismatch { relative, worst_at, boundary_flag })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfSimReport {
    pub linear: Mismatch,
    pub first_iterate: Option<Mismatch>,
    pub omega_times: Vec<f64>,
    /// `t^beta || U(t) omega ||_{(alpha+2, inf)}`.
    pub omega_weighted: Vec<f64>,
    pub fit: RateFit,
    pub predicted_rate: f64,
    pub params: SelfSimParams,
}

impl SelfSimReport {
    pub fn checks(&self) -> Vec<Check> {
        vec![
            Check::at_most("selfsim_linear_mismatch", self.linear.relative, self.params.mismatch_tolerance),
            Check::relative("selfsim_perturbation_slope", self.fit.slope, self.predicted_rate, self.params.slope_tolerance),
        ]
    }

    pub fn output(&self) -> ExperimentOutput {
        let mut out = ExperimentOutput::new(&["t", "weighted_perturbation_norm"]);
        for (t, v) in self.omega_times.iter().zip(&self.omega_weighted) {
            out.push_row(vec![*t, *v]);
        }
        out.note("linear_mismatch", self.linear.relative);
        out.note("linear_worst_at", format!("{:?}", self.linear.worst_at));
        out.note("boundary_contamination", self.linear.boundary_flag);
        if self.linear.boundary_flag {
            out.note("advice", "mismatch concentrated near the comparison edge; rerun with a larger domain");
        }
        if let Some(m) = &self.first_iterate {
            out.note("first_iterate_mismatch", m.relative);
        }
        out.note("fitted_slope", self.fit.slope);
        out.note("predicted_slope", self.predicted_rate);
        out.checks = self.checks();
        out
    }
}

/// Self-similarity checks for data homogeneous of degree `-d/alpha`.
pub fn exp_selfsim(cfg: &ModelConfig, grid: &Grid, params: &SelfSimParams) -> Result<SelfSimReport> {
    let model = Model::new(cfg, grid)?;
    let d = cfg.d();
    let lam = params.lambda as f64;
    let factor = lam.powf(-d / cfg.alpha);
    let v0 = power_profile(grid, d / cfg.alpha, OriginRule::HalfDiagonal);
    let t_big = lam.powf(d) * params.t;
    let a = model.propagate(&v0, t_big)?;
    let b = model.propagate(&v0, params.t)?;
    let linear = scaling_mismatch(&a, &b, params.lambda, factor)?;

    let first_iterate = if params.first_iterate_nt >= 3 {
        let mut c0 = cfg.clone();
        c0.b = Complex64::new(0.0, 0.0);
        let m0 = Model::new(&c0, grid)?;
        let iterate = |t_end: f64| -> Result<Field> {
            let tr = SolutionTrace::linear(&m0, &v0, SolutionTrace::uniform_times(t_end, params.first_iterate_nt))?;
            let lin = tr.last().clone();
            Ok(&lin + &duhamel_integral(&m0, &tr, t_end, Quadrature::Simpson)?)
        };
        Some(scaling_mismatch(&iterate(t_big)?, &iterate(params.t)?, params.lambda, factor)?)
    } else {
        None
    };

    let omega = gaussian(grid, params.omega_amplitude, params.omega_sigma, &[]);
    let beta = beta_exponent(cfg.n, d, cfg.alpha);
    let p = cfg.alpha + 2.0;
    let omega_weighted = params
        .fit_times
        .iter()
        .map(|&t| Ok(t.powf(beta) * weak_lp_norm(&model.propagate(&omega, t)?, p)?.norm))
        .collect::<Result<Vec<f64>>>()?;
    let fit = fit_decay_exponent(&params.fit_times, &omega_weighted)?;
    let kappa = cfg.n as f64 * cfg.alpha / (d * (cfg.alpha + 2.0));
    Ok(SelfSimReport {
        linear,
        first_iterate,
        omega_times: params.fit_times.clone(),
        omega_weighted,
        fit,
        predicted_rate: beta - kappa,
        params: params.clone(),
    })
}
