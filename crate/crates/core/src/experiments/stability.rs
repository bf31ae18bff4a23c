use crate::duhamel::Model;
use crate::error::Result;
use crate::experiments::fit::{fit_decay_exponent, geometric_times, RateFit};
use crate::experiments::report::{Check, ExperimentOutput};
use crate::grid::Field;
use crate::lorentz::weak_lp_norm;
use crate::reference::{evolve_model, EvolveSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityParams {
    pub mu: f64,
    pub fit_times: Vec<f64>,
    pub dt: f64,
    pub dt_growth: f64,
    /// Allowed excess of the fitted slope over `-mu`.
    pub slack: f64,
}

impl StabilityParams {
    pub fn new(mu: f64) -> Self {
        StabilityParams { mu, fit_times: geometric_times(4.0, 64.0, 16), dt: 0.05, dt_growth: 0.02, slack: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub times: Vec<f64>,
    pub linear_diff: Vec<f64>,
    pub nonlinear_diff: Vec<f64>,
    pub linear_fit: Option<RateFit>,
    pub fit: Option<RateFit>,
    /// The free evolution of `u0 - v0` decays faster than `t^{-mu}`.
    pub hypothesis_met: bool,
    pub params: StabilityParams,
}

impl StabilityReport {
    pub fn identical(&self) -> bool {
        self.nonlinear_diff.iter().all(|&v| v == 0.0)
    }

    pub fn checks(&self) -> Vec<Check> {
        if self.identical() {
            return vec![Check::at_most("stability_difference", 0.0, 0.0)];
        }
        match (&self.fit, self.hypothesis_met) {
            (Some(f), true) => vec![Check::at_most("stability_slope", f.slope, -self.params.mu + self.params.slack)],
            _ => Vec::new(),
        }
    }

    pub fn output(&self) -> ExperimentOutput {
        let mut out = ExperimentOutput::new(&["t", "linear_difference", "difference"]);
        for k in 0..self.times.len() {
            out.push_row(vec![self.times[k], self.linear_diff[k], self.nonlinear_diff[k]]);
        }
        out.note("mu", self.params.mu);
        out.note("hypothesis", if self.hypothesis_met { "met" } else { "hypothesis unmet" });
        if let Some(f) = &self.linear_fit {
            out.note("linear_slope", f.slope);
        }
        if let Some(f) = &self.fit {
            out.note("fitted_slope", f.slope);
        }
        out.checks = self.checks();
        out
    }
}

/// Evolves two nearby data and fits the decay of their weak-norm difference.
pub fn exp_stability(model: &Model, u0: &Field, v0: &Field, params: &StabilityParams) -> Result<StabilityReport> {
    u0.check_same_grid(v0)?;
    let p = model.cfg().alpha + 2.0;
    let w0 = u0 - v0;
    let times = params.fit_times.clone();
    let linear_diff = times
        .iter()
        .map(|&t| Ok(weak_lp_norm(&model.propagate(&w0, t)?, p)?.norm))
        .collect::<Result<Vec<f64>>>()?;
    let positive = |v: &[f64]| v.iter().all(|&x| x > 0.0);
    let linear_fit = if positive(&linear_diff) { Some(fit_decay_exponent(&times, &linear_diff)?) } else { None };
    let hypothesis_met = linear_fit.as_ref().is_some_and(|f| f.slope < -params.mu);
    let t_end = times.iter().copied().fold(0.0, f64::max);
    let spec = EvolveSpec::new(t_end, params.dt, times.clone()).with_growth(params.dt_growth);
    let (u, v) = if w0.max_abs() == 0.0 {
        let u = evolve_model(model, u0, &spec)?;
        (u.clone(), u)
    } else {
        (evolve_model(model, u0, &spec)?, evolve_model(model, v0, &spec)?)
    };
    let nonlinear_diff = (0..times.len())
        .map(|k| Ok(weak_lp_norm(&(&u.fields[k] - &v.fields[k]), p)?.norm))
        .collect::<Result<Vec<f64>>>()?;
    let fit = if positive(&nonlinear_diff) { Some(fit_decay_exponent(&times, &nonlinear_diff)?) } else { None };
    Ok(StabilityReport { times, linear_diff, nonlinear_diff, linear_fit, fit, hypothesis_met, params: params.clone() })
}
