use crate::error::{Error, Result};
use crate::experiments::fit::{fit_decay_exponent, RateFit};
use crate::experiments::report::{Check, ExperimentOutput};
use crate::grid::{norm3, Field};
use crate::lorentz::weak_lp_norm;
use crate::spectral::{to_fourier, DispersionSymbol, Propagator};

/// Norm whose decay is measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayNorm {
    /// Maximum modulus, the `p -> 1` limit.
    Sup,
    /// Weak-`L^{p'}` norm for data in weak-`L^p`, `1 < p < 2`.
    WeakLp { p: f64 },
}

impl DecayNorm {
    /// `-(n/d)(2/p - 1)`.
    pub fn predicted_slope(&self, n: usize, d: f64) -> f64 {
        let k = n as f64 / d;
        match *self {
            DecayNorm::Sup => -k,
            DecayNorm::WeakLp { p } => -k * (2.0 / p - 1.0),
        }
    }

    pub fn measure(&self, f: &Field) -> Result<f64> {
        match *self {
            DecayNorm::Sup => Ok(f.max_abs()),
            DecayNorm::WeakLp { p } => Ok(weak_lp_norm(f, p / (p - 1.0))?.norm),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersiveParams {
    pub times: Vec<f64>,
    pub norm: DecayNorm,
    /// Relative tolerance on the slope.
    pub slope_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersiveReport {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub fit: RateFit,
    pub predicted: f64,
    /// `L / (2 v)` with `v` the group speed at the largest significant data wavenumber.
    pub wrap_horizon: f64,
    pub slope_tolerance: f64,
}

impl DispersiveReport {
    pub fn passed(&self) -> bool {
        ((self.fit.slope / self.predicted) - 1.0).abs() <= self.slope_tolerance
    }

    pub fn window_inside_horizon(&self) -> bool {
        self.fit.t_hi <= self.wrap_horizon
    }

    pub fn output(&self) -> ExperimentOutput {
        let mut out = ExperimentOutput::new(&["t", "norm", "fitted_slope"]);
        for (t, v) in self.times.iter().zip(&self.norms) {
            out.push_row(vec![*t, *v, self.fit.slope]);
        }
        out.note("predicted_slope", self.predicted);
        out.note("r_squared", self.fit.r_squared);
        out.note("wrap_horizon", self.wrap_horizon);
        out.note("window_inside_horizon", self.window_inside_horizon());
        out.checks.push(Check::relative("dispersive_slope", self.fit.slope, self.predicted, self.slope_tolerance));
        out
    }
}

/// Largest `|xi|` whose data coefficient exceeds `rel` times the peak coefficient.
pub fn significant_wavenumber(f: &Field, rel: f64) -> f64 {
    let c = to_fourier(f);
    let peak = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    f.grid()
        .wavevectors()
        .iter()
        .zip(&c)
        .filter(|(_, z)| z.norm() > rel * peak)
        .map(|(xi, _)| norm3(xi))
        .fold(0.0, f64::max)
}

pub fn wrap_horizon(f: &Field, q: &DispersionSymbol) -> f64 {
    let speed = q.max_group_speed(significant_wavenumber(f, 1e-6));
    let l = f.grid().extents().iter().copied().fold(f64::INFINITY, f64::min);
    if speed > 0.0 {
        l / (2.0 * speed)
    } else {
        f64::INFINITY
    }
}

/// Free evolution of `data`, decay of the chosen norm fitted over `times`.
pub fn exp_dispersive(q: &DispersionSymbol, data: &Field, params: &DispersiveParams) -> Result<DispersiveReport> {
    if let DecayNorm::WeakLp { p } = params.norm {
        if !(p > 1.0 && p < 2.0) {
            return Err(Error::InvalidArgument(format!("data exponent p = {p} must lie in (1, 2)")));
        }
    }
    let prop = Propagator::new(data.grid(), q)?;
    let norms = params
        .times
        .iter()
        .map(|&t| params.norm.measure(&prop.apply(data, t)?))
        .collect::<Result<Vec<f64>>>()?;
    let fit = fit_decay_exponent(&params.times, &norms)?;
    Ok(DispersiveReport {
        times: params.times.clone(),
        norms,
        fit,
        predicted: params.norm.predicted_slope(data.grid().dim(), q.degree),
        wrap_horizon: wrap_horizon(data, q),
        slope_tolerance: params.slope_tolerance,
    })
}
