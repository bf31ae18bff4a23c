//! Strang splitting with exact linear and nonlinear-phase substeps.

use num_complex::Complex64;

use crate::duhamel::{Model, SolutionTrace};
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::params::ModelConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveSpec {
    pub t_final: f64,
    pub dt: f64,
    /// Sorted times in `[0, t_final]` at which the state is recorded.
    pub snapshot_times: Vec<f64>,
    pub dealias: bool,
    /// Local step is `dt + dt_growth * t`; 0 gives a fixed step.
    pub dt_growth: f64,
}

impl EvolveSpec {
    pub fn new(t_final: f64, dt: f64, snapshot_times: Vec<f64>) -> Self {
        EvolveSpec { t_final, dt, snapshot_times, dealias: false, dt_growth: 0.0 }
    }

    pub fn with_growth(mut self, g: f64) -> Self {
        self.dt_growth = g;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) || !(self.dt_growth >= 0.0) {
            return Err(Error::InvalidArgument("final time and step growth must be nonnegative".into()));
        }
        if self.snapshot_times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("snapshot times must be strictly increasing".into()));
        }
        if self.snapshot_times.iter().any(|&t| t < 0.0 || t > self.t_final * (1.0 + 1e-12)) {
            return Err(Error::InvalidArgument("snapshot times must lie in [0, T_final]".into()));
        }
        Ok(())
    }
}

fn check_real(cfg: &ModelConfig) -> Result<()> {
    if cfg.a.im != 0.0 || cfg.b.im != 0.0 {
        return Err(Error::InvalidArgument("the splitting solver needs real a and b".into()));
    }
    Ok(())
}

/// Nonlinear substep `u <- u exp(-i dt (a |u|^alpha + b E(|u|^gamma)))`.
pub fn phase_step(model: &Model, f: &Field, dt: f64) -> Field {
    let cfg = model.cfg();
    let (a, b, al) = (cfg.a.re, cfg.b.re, cfg.alpha);
    let pot = if b != 0.0 { Some(model.nonlocal_potential(f)) } else { None };
    let vals: Vec<Complex64> = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            let mut w = a * z.norm().powf(al);
            if let Some(p) = &pot {
                w += b * p[i];
            }
            z * Complex64::from_polar(1.0, -dt * w)
        })
        .collect();
    Field::from_parts(f.grid().clone(), vals)
}

fn step(model: &Model, f: &Field, dt: f64) -> Result<Field> {
    let half = model.propagate(f, dt / 2.0)?;
    let mut mid = phase_step(model, &half, dt);
    if model.dealias {
        mid = crate::spectral::dealias(&mid);
    }
    model.propagate(&mid, dt / 2.0)
}

/// One Strang step: half linear, exact phase, half linear.
pub fn strang_step(f: &Field, cfg: &ModelConfig, dt: f64) -> Result<Field> {
    check_real(cfg)?;
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt = {dt} must be positive")));
    }
    step(&Model::new(cfg, f.grid())?, f, dt)
}

/// Same as `strang_step` for a prepared model; negative `dt` runs backwards.
pub fn strang_step_model(model: &Model, f: &Field, dt: f64) -> Result<Field> {
    check_real(model.cfg())?;
    step(model, f, dt)
}

pub fn evolve(u0: &Field, cfg: &ModelConfig, spec: &EvolveSpec) -> Result<SolutionTrace> {
    let model = Model::new(cfg, u0.grid())?.with_dealias(spec.dealias);
    evolve_model(&model, u0, spec)
}

/// Steps to each snapshot in turn, shortening the last step before it so
/// snapshots fall exactly on the requested times.
pub fn evolve_model(model: &Model, u0: &Field, spec: &EvolveSpec) -> Result<SolutionTrace> {
    check_real(model.cfg())?;
    spec.validate()?;
    let mut u = u0.clone();
    let mut t = 0.0;
    let mut times = Vec::with_capacity(spec.snapshot_times.len());
    let mut fields = Vec::with_capacity(spec.snapshot_times.len());
    for &ts in &spec.snapshot_times {
        while ts - t > 1e-12 * ts.max(1.0) {
            let nominal = spec.dt + spec.dt_growth * t;
            let remaining = ts - t;
            // avoid a sliver step right before the snapshot
            let h = if remaining <= nominal * 1.000001 {
                remaining
            } else if remaining < 2.0 * nominal {
                remaining / 2.0
            } else {
                nominal
            };
            u = step(model, &u, h)?;
            t += h;
            if !u.is_finite() {
                return Err(Error::NonFinite(format!("solution lost finiteness at t = {t}")));
            }
        }
        t = ts;
        times.push(ts);
        fields.push(u.clone());
    }
    SolutionTrace::new(times, fields, model.cfg().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::spectral::{propagate, DispersionSymbol};

    fn setup() -> (Field, ModelConfig) {
        let g = Grid::cubic(1, 128, 30.0).unwrap();
        (Field::from_real_fn(&g, |x| 0.5 * (-x[0] * x[0]).exp()), ModelConfig::nls(1, 1.0, 0.0, 2.0, 3.0))
    }

    #[test]
    fn free_step_is_propagation() {
        let (u0, mut cfg) = setup();
        cfg.a = Complex64::new(0.0, 0.0);
        let s = strang_step(&u0, &cfg, 0.3).unwrap();
        let p = propagate(&u0, &DispersionSymbol::laplacian(), 0.3).unwrap();
        assert!((&s - &p).max_abs() < 1e-14);
    }

    #[test]
    fn step_preserves_mass() {
        let (u0, cfg) = setup();
        let s = strang_step(&u0, &cfg, 0.1).unwrap();
        assert!((s.l2_norm() / u0.l2_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_coefficients_rejected() {
        let (u0, mut cfg) = setup();
        cfg.b = Complex64::new(0.0, 1.0);
        assert!(strang_step(&u0, &cfg, 0.1).is_err());
    }

    #[test]
    fn snapshots_land_on_times() {
        let (u0, cfg) = setup();
        let spec = EvolveSpec::new(1.0, 0.07, vec![0.0, 0.33, 1.0]);
        let tr = evolve(&u0, &cfg, &spec).unwrap();
        assert_eq!(tr.times, vec![0.0, 0.33, 1.0]);
        assert_eq!(tr.fields[0], u0);
        let zero = evolve(&Field::zeros(u0.grid()), &cfg, &spec).unwrap();
        assert!(zero.fields.iter().all(|f| f.max_abs() == 0.0));
        assert!(evolve(&u0, &cfg, &EvolveSpec::new(1.0, 0.1, vec![0.5, 2.0])).is_err());
    }

    #[test]
    fn linear_run_matches_propagator() {
        let (u0, mut cfg) = setup();
        cfg.a = Complex64::new(0.0, 0.0);
        let spec = EvolveSpec::new(2.0, 0.01, vec![0.5, 1.0, 2.0]);
        let tr = evolve(&u0, &cfg, &spec).unwrap();
        for (t, f) in tr.times.iter().zip(&tr.fields) {
            let p = propagate(&u0, &cfg.symbol, *t).unwrap();
            assert!((f - &p).max_abs() < 1e-10);
        }
    }
}
