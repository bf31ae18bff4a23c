use crate::duhamel::Model;
use crate::error::{Error, Result};
use crate::experiments::fit::{fit_decay_exponent, geometric_times, RateFit};
use crate::experiments::report::{Check, ExperimentOutput};
use crate::grid::Field;
use crate::lorentz::{sobolev_lorentz_norm, weak_lp_norm};
use crate::params::{beta_exponent, derive_exponents};
use crate::reference::{evolve_model, EvolveSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterParams {
    pub fit_times: Vec<f64>,
    pub t_max: f64,
    /// Geometric samples on `[t_max / 8, t_max]` used for the tail estimate.
    pub late_count: usize,
    pub dt: f64,
    pub dt_growth: f64,
    pub slope_tolerance: f64,
    /// The run is inconclusive when the tail bound exceeds this fraction of the final difference.
    pub tail_ratio_limit: f64,
}

impl Default for ScatterParams {
    fn default() -> Self {
        ScatterParams {
            fit_times: geometric_times(4.0, 64.0, 16),
            t_max: 1024.0,
            late_count: 13,
            dt: 0.05,
            dt_growth: 0.02,
            slope_tolerance: 0.2,
            tail_ratio_limit: 0.1,
        }
    }
}

/// Power-law extrapolation of the scattering integral beyond the truncation time.
#[derive(Debug, Clone, PartialEq)]
pub struct TailEstimate {
    /// Fitted decay exponent of the integrand norm (positive means decaying).
    pub kappa: f64,
    pub r_squared: f64,
    /// `int_T^inf C s^{-kappa} ds`, infinite when `kappa <= 1`.
    pub bound: f64,
    /// The same bound from `T / 2`.
    pub bound_half: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterReport {
    pub fit_times: Vec<f64>,
    pub diff_norms: Vec<f64>,
    pub diff_sobolev: Vec<f64>,
    pub fit: Option<RateFit>,
    pub fit_sobolev: Option<RateFit>,
    pub beta: f64,
    pub delta: Option<f64>,
    pub tail: Option<TailEstimate>,
    /// `|| u_+(T) - u_+(T/2) ||` in the weak norm.
    pub u_plus_change_half: f64,
    /// `|| u_+ - u_0 ||` in the weak norm.
    pub u_plus_shift: f64,
    pub slope_tolerance: f64,
    pub tail_ratio_limit: f64,
}

impl ScatterReport {
    pub fn tail_ratio(&self) -> f64 {
        match (&self.tail, self.diff_norms.last()) {
            (Some(t), Some(&d)) if d > 0.0 => t.bound / d,
            (None, _) => 0.0,
            _ => f64::INFINITY,
        }
    }

    pub fn inconclusive(&self) -> bool {
        self.tail_ratio() > self.tail_ratio_limit
    }

    pub fn checks(&self) -> Vec<Check> {
        let mut c = Vec::new();
        match &self.fit {
            Some(f) => c.push(Check::relative("scatter_slope", f.slope, -self.beta, self.slope_tolerance)),
            None => c.push(Check::at_most("scatter_difference_zero", self.diff_norms.iter().copied().fold(0.0, f64::max), 0.0)),
        }
        c.push(Check::at_most("scatter_tail_ratio", self.tail_ratio(), self.tail_ratio_limit));
        c
    }

    pub fn output(&self) -> ExperimentOutput {
        let mut out = ExperimentOutput::new(&["t", "diff_weak", "diff_sobolev"]);
        for k in 0..self.fit_times.len() {
            out.push_row(vec![self.fit_times[k], self.diff_norms[k], self.diff_sobolev[k]]);
        }
        out.note("beta", self.beta);
        if let Some(f) = &self.fit {
            out.note("fitted_slope", f.slope);
            out.note("r_squared", f.r_squared);
        }
        if let (Some(f), Some(d)) = (&self.fit_sobolev, self.delta) {
            out.note("fitted_slope_sobolev", f.slope);
            out.note("delta", d);
        }
        if let Some(t) = &self.tail {
            out.note("integrand_decay", t.kappa);
            out.note("tail_bound", t.bound);
            out.note("tail_bound_half", t.bound_half);
        }
        out.note("tail_ratio", self.tail_ratio());
        out.note("inconclusive", self.inconclusive());
        out.note("u_plus_change_half", self.u_plus_change_half);
        out.note("u_plus_shift", self.u_plus_shift);
        out.checks = self.checks();
        out
    }
}

/// Runs the splitting solver to `t_max`, forms `u_+ = U(-t_max) u(t_max)` and
/// fits the decay of `u(t) - U(t) u_+` on the fit window.
pub fn exp_scattering(model: &Model, u0: &Field, params: &ScatterParams) -> Result<ScatterReport> {
    let cfg = model.cfg();
    let p = cfg.alpha + 2.0;
    let beta = beta_exponent(cfg.n, cfg.d(), cfg.alpha);
    let dp = derive_exponents(cfg).ok();
    let t_hi = params.fit_times.iter().copied().fold(0.0, f64::max);
    if !(params.t_max > 2.0 * t_hi) {
        return Err(Error::InvalidArgument("t_max must exceed twice the end of the fit window".into()));
    }
    let late = geometric_times(params.t_max / 8.0, params.t_max, params.late_count.max(8));
    let half = params.t_max / 2.0;
    let mut snaps: Vec<f64> = params.fit_times.iter().chain(&late).copied().chain([half]).collect();
    snaps.sort_by(f64::total_cmp);
    snaps.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs());
    let spec = EvolveSpec::new(params.t_max, params.dt, snaps).with_growth(params.dt_growth);
    let trace = evolve_model(model, u0, &spec)?;
    let at = |t: f64| -> &Field {
        let k = trace.times.iter().position(|&s| (s - t).abs() <= 1e-9 * t.abs().max(1.0)).expect("snapshot present");
        &trace.fields[k]
    };
    let u_plus = model.propagate(trace.last(), -params.t_max)?;
    let u_plus_half = model.propagate(at(half), -half)?;
    let u_plus_change_half = weak_lp_norm(&(&u_plus - &u_plus_half), p)?.norm;
    let u_plus_shift = weak_lp_norm(&(&u_plus - u0), p)?.norm;

    let mut diff_norms = Vec::new();
    let mut diff_sobolev = Vec::new();
    for &t in &params.fit_times {
        let d = at(t) - &model.propagate(&u_plus, t)?;
        diff_norms.push(weak_lp_norm(&d, p)?.norm);
        diff_sobolev.push(match &dp {
            Some(dp) => sobolev_lorentz_norm(&d, dp.s, p)?,
            None => 0.0,
        });
    }
    let nonzero = diff_norms.iter().all(|&v| v > 0.0);
    let fit = if nonzero { Some(fit_decay_exponent(&params.fit_times, &diff_norms)?) } else { None };
    let fit_sobolev = if nonzero && dp.is_some() { fit_decay_exponent(&params.fit_times, &diff_sobolev).ok() } else { None };

    // Integrand of the scattering integral seen at the end of the fit window.
    let mut integrand = Vec::new();
    for &s in &late {
        let f = model.nonlinearity(at(s))?;
        integrand.push(weak_lp_norm(&model.propagate(&f, t_hi - s)?, p)?.norm);
    }
    let tail = if integrand.iter().all(|&v| v > 0.0) {
        let f = fit_decay_exponent(&late, &integrand)?;
        let kappa = -f.slope;
        let c = integrand.last().unwrap() * params.t_max.powf(kappa);
        let tail_from = |t0: f64| if kappa > 1.0 { c * t0.powf(1.0 - kappa) / (kappa - 1.0) } else { f64::INFINITY };
        Some(TailEstimate { kappa, r_squared: f.r_squared, bound: tail_from(params.t_max), bound_half: tail_from(half) })
    } else {
        None
    };
    Ok(ScatterReport {
        fit_times: params.fit_times.clone(),
        diff_norms,
        diff_sobolev,
        fit,
        fit_sobolev,
        beta,
        delta: dp.map(|d| d.delta),
        tail,
        u_plus_change_half,
        u_plus_shift,
        slope_tolerance: params.slope_tolerance,
        tail_ratio_limit: params.tail_ratio_limit,
    })
}
