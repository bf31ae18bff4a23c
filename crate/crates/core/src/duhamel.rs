//! Duhamel integral, Picard map and the time-weighted norms of the solution space.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::lorentz::{sobolev_lorentz_norm, weak_lp_norm};
use crate::params::{beta_exponent, derive_exponents, DerivedParams, ModelConfig};
use crate::spectral::{dealias, from_fourier, multiplier_table, to_fourier, MultiplierSpec, Propagator};

/// A model bound to a grid, with the symbol tables precomputed.
#[derive(Debug, Clone)]
pub struct Model {
    cfg: ModelConfig,
    prop: Propagator,
    // None when the nonlocal part is absent or the identity.
    mult: Option<Vec<f64>>,
    pub dealias: bool,
}

impl Model {
    pub fn new(cfg: &ModelConfig, grid: &Grid) -> Result<Self> {
        cfg.validate()?;
        if grid.dim() != cfg.n {
            return Err(Error::ShapeMismatch(format!("model has n = {}, grid has dimension {}", cfg.n, grid.dim())));
        }
        let prop = Propagator::new(grid, &cfg.symbol)?;
        let mult = if cfg.b == Complex64::new(0.0, 0.0) || cfg.multiplier == MultiplierSpec::Identity {
            None
        } else {
            Some(multiplier_table(grid, &cfg.multiplier)?)
        };
        Ok(Model { cfg: cfg.clone(), prop, mult, dealias: false })
    }

    pub fn with_dealias(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    pub fn cfg(&self) -> &ModelConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &Grid {
        self.prop.grid()
    }

    pub fn propagator(&self) -> &Propagator {
        &self.prop
    }

    pub fn propagate(&self, f: &Field, t: f64) -> Result<Field> {
        self.prop.apply(f, t)
    }

    fn check(&self, f: &Field) -> Result<()> {
        if f.grid() != self.grid() {
            return Err(Error::ShapeMismatch("field grid differs from model grid".into()));
        }
        Ok(())
    }

    /// `E(|f|^gamma)`, real because the symbol is real and even.
    pub fn nonlocal_potential(&self, f: &Field) -> Vec<f64> {
        let g = self.cfg.gamma;
        let pw: Vec<Complex64> = f.values().iter().map(|z| Complex64::new(z.norm().powf(g), 0.0)).collect();
        match &self.mult {
            None => pw.into_iter().map(|z| z.re).collect(),
            Some(m) => {
                let mut c = pw;
                crate::fft::forward(self.grid(), &mut c);
                c.iter_mut().zip(m).for_each(|(z, m)| *z *= m);
                crate::fft::inverse(self.grid(), &mut c);
                c.into_iter().map(|z| z.re).collect()
            }
        }
    }

    /// `a |f|^alpha f + b E(|f|^gamma) f`.
    pub fn nonlinearity(&self, f: &Field) -> Result<Field> {
        self.check(f)?;
        let zero = Complex64::new(0.0, 0.0);
        let (a, b, al) = (self.cfg.a, self.cfg.b, self.cfg.alpha);
        let pot = if b != zero { Some(self.nonlocal_potential(f)) } else { None };
        let vals: Vec<Complex64> = f
            .values()
            .iter()
            .enumerate()
            .map(|(i, &z)| {
                let mut w = a * z.norm().powf(al);
                if let Some(p) = &pot {
                    w += b * p[i];
                }
                w * z
            })
            .collect();
        let out = Field::from_parts(self.grid().clone(), vals);
        Ok(if self.dealias { dealias(&out) } else { out })
    }
}

pub fn nonlinearity(f: &Field, cfg: &ModelConfig) -> Result<Field> {
    Model::new(cfg, f.grid())?.nonlinearity(f)
}

/// Time samples with one field each.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionTrace {
    pub times: Vec<f64>,
    pub fields: Vec<Field>,
    pub cfg: ModelConfig,
}

impl SolutionTrace {
    pub fn new(times: Vec<f64>, fields: Vec<Field>, cfg: ModelConfig) -> Result<Self> {
        if times.len() != fields.len() || times.is_empty() {
            return Err(Error::ShapeMismatch("times and fields differ in length".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("trace times must be strictly increasing".into()));
        }
        for f in &fields[1..] {
            fields[0].check_same_grid(f)?;
        }
        Ok(SolutionTrace { times, fields, cfg })
    }

    pub fn uniform_times(t_final: f64, nt: usize) -> Vec<f64> {
        (0..nt).map(|j| t_final * j as f64 / (nt - 1) as f64).collect()
    }

    /// `t_j -> U(t_j) u0`.
    pub fn linear(model: &Model, u0: &Field, times: Vec<f64>) -> Result<Self> {
        let c0 = to_fourier(u0);
        let fields = times
            .par_iter()
            .map(|&t| {
                let mut c = c0.clone();
                model.prop.evolve_coeffs(&mut c, t);
                from_fourier(model.grid(), c)
            })
            .collect();
        SolutionTrace::new(times, fields, model.cfg.clone())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn grid(&self) -> &Grid {
        self.fields[0].grid()
    }

    pub fn last(&self) -> &Field {
        self.fields.last().expect("nonempty trace")
    }

    pub fn scale(&self, c: f64) -> SolutionTrace {
        SolutionTrace { times: self.times.clone(), fields: self.fields.iter().map(|f| f.scale(c)).collect(), cfg: self.cfg.clone() }
    }

    pub fn is_uniform(&self) -> bool {
        if self.times.len() < 2 {
            return true;
        }
        let h = self.times[1] - self.times[0];
        self.times.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1e-300))
    }

    fn check_compatible(&self, other: &SolutionTrace) -> Result<()> {
        if self.times != other.times {
            return Err(Error::ShapeMismatch("traces have different time samples".into()));
        }
        self.fields[0].check_same_grid(&other.fields[0])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Quadrature {
    /// Composite Simpson; an odd interval count ends with a 3/8 panel.
    #[default]
    Simpson,
    Trapezoid,
}

/// Weights on samples `0..=m` of a uniform grid of step `h`.
fn weights(rule: Quadrature, m: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; m + 1];
    match rule {
        _ if m < 2 => return weights(Quadrature::Trapezoid, m, h),
        Quadrature::Trapezoid => {
            for k in 0..m {
                w[k] += h / 2.0;
                w[k + 1] += h / 2.0;
            }
        }
        Quadrature::Simpson => {
            let (simpson_end, tail38) = if m.is_multiple_of(2) { (m, false) } else { (m - 3, true) };
            let mut k = 0;
            while k + 2 <= simpson_end {
                w[k] += h / 3.0;
                w[k + 1] += 4.0 * h / 3.0;
                w[k + 2] += h / 3.0;
                k += 2;
            }
            if tail38 {
                let b = m - 3;
                for (i, c) in [1.0, 3.0, 3.0, 1.0].iter().enumerate() {
                    w[b + i] += 3.0 * h / 8.0 * c;
                }
            }
        }
    }
    w
}

/// Fourier-side integrand pieces `e^{-i t_k q} fft(N(u(t_k)))`, shared by every `t_j`.
fn pulled_back(model: &Model, trace: &SolutionTrace, upto: usize) -> Result<Vec<Vec<Complex64>>> {
    (0..=upto)
        .into_par_iter()
        .map(|k| {
            let nl = model.nonlinearity(&trace.fields[k])?;
            let mut c = to_fourier(&nl);
            model.prop.evolve_coeffs(&mut c, -trace.times[k]);
            Ok(c)
        })
        .collect()
}

fn combine(model: &Model, pieces: &[Vec<Complex64>], coeffs: &[(usize, f64)], t: f64) -> Field {
    let mut acc = vec![Complex64::new(0.0, 0.0); model.grid().len()];
    for &(k, w) in coeffs {
        if w != 0.0 {
            acc.iter_mut().zip(&pieces[k]).for_each(|(a, z)| *a += z * w);
        }
    }
    model.prop.evolve_coeffs(&mut acc, t);
    acc.iter_mut().for_each(|z| *z *= -Complex64::i());
    from_fourier(model.grid(), acc)
}

/// `B(u)(t) = -i int_0^t U(t - s) N(u(s)) ds` at the trace sample equal to `t`.
///
/// The sign makes `U(t) u0 + B(u)` the mild form of `i u_t + L u = N(u)` with
/// `U(t) = e^{itq(D)}`, the same equation the splitting solver integrates.
pub fn duhamel_integral(model: &Model, trace: &SolutionTrace, t: f64, rule: Quadrature) -> Result<Field> {
    let j = sample_index(trace, t)?;
    if j < 2 {
        return Err(Error::InvalidArgument(format!("only {} samples in [0, {t}], need 3", j + 1)));
    }
    if !trace.is_uniform() {
        return Err(Error::InvalidArgument("Duhamel quadrature needs a uniform trace".into()));
    }
    let h = trace.times[1] - trace.times[0];
    let pieces = pulled_back(model, trace, j)?;
    let w: Vec<(usize, f64)> = weights(rule, j, h).into_iter().enumerate().collect();
    Ok(combine(model, &pieces, &w, t))
}

fn sample_index(trace: &SolutionTrace, t: f64) -> Result<usize> {
    let (t0, tk) = (trace.times[0], *trace.times.last().unwrap());
    if t < t0 - 1e-12 || t > tk + 1e-12 * tk.abs().max(1.0) {
        return Err(Error::InvalidArgument(format!("t = {t} outside trace window [{t0}, {tk}]")));
    }
    trace
        .times
        .iter()
        .position(|&s| (s - t).abs() <= 1e-12 * s.abs().max(1.0))
        .ok_or_else(|| Error::InvalidArgument(format!("t = {t} is not a trace sample")))
}

/// `(Phi u)(t_j) = U(t_j) u0 + B(u)(t_j)` at every sample.
pub fn picard_map(model: &Model, trace: &SolutionTrace, u0: &Field) -> Result<SolutionTrace> {
    picard_map_with(model, trace, u0, Quadrature::Simpson)
}

pub fn picard_map_with(model: &Model, trace: &SolutionTrace, u0: &Field, rule: Quadrature) -> Result<SolutionTrace> {
    u0.check_same_grid(&trace.fields[0])?;
    if trace.times[0] != 0.0 {
        return Err(Error::InvalidArgument("Picard traces start at t = 0".into()));
    }
    if !trace.is_uniform() || trace.len() < 3 {
        return Err(Error::InvalidArgument("Picard traces need at least 3 uniform samples".into()));
    }
    let h = trace.times[1];
    let last = trace.len() - 1;
    let pieces = pulled_back(model, trace, last)?;
    let c0 = to_fourier(u0);
    let fields = (0..trace.len())
        .into_par_iter()
        .map(|j| {
            let t = trace.times[j];
            let mut lin = c0.clone();
            model.prop.evolve_coeffs(&mut lin, t);
            let lin = from_fourier(model.grid(), lin);
            let w: Vec<(usize, f64)> = match j {
                0 => Vec::new(),
                // quadratic through samples 0, 1, 2 integrated over the first interval
                1 if rule == Quadrature::Simpson => {
                    vec![(0, 5.0 * h / 12.0), (1, 8.0 * h / 12.0), (2, -h / 12.0)]
                }
                _ => weights(rule, j, h).into_iter().enumerate().collect(),
            };
            if w.is_empty() {
                return lin;
            }
            &lin + &combine(model, &pieces, &w, t)
        })
        .collect();
    SolutionTrace::new(trace.times.clone(), fields, trace.cfg.clone())
}

/// `max_j t_j^beta || u(t_j) - v(t_j) ||_{(alpha+2, inf)}`, `t = 0` excluded.
pub fn xm_distance(u: &SolutionTrace, v: &SolutionTrace, beta: f64) -> Result<f64> {
    u.check_compatible(v)?;
    let p = u.cfg.alpha + 2.0;
    let vals: Result<Vec<f64>> = (0..u.len())
        .into_par_iter()
        .filter(|&j| u.times[j] > 0.0)
        .map(|j| Ok(u.times[j].powf(beta) * weak_lp_norm(&(&u.fields[j] - &v.fields[j]), p)?.norm))
        .collect();
    Ok(vals?.into_iter().fold(0.0, f64::max))
}

/// `(sup t^beta ||u||_{(p,inf)}, sup t^delta ||Lambda^s u||_{(p,inf)})` over the
/// positive trace times. A window-restricted surrogate for the sup over all `t > 0`.
pub fn xm_norms(u: &SolutionTrace, dp: &DerivedParams) -> Result<(f64, f64)> {
    let p = dp.alpha + 2.0;
    let vals: Result<Vec<(f64, f64)>> = (0..u.len())
        .into_par_iter()
        .filter(|&j| u.times[j] > 0.0)
        .map(|j| {
            let t = u.times[j];
            let f = &u.fields[j];
            Ok((t.powf(dp.beta) * weak_lp_norm(f, p)?.norm, t.powf(dp.delta) * sobolev_lorentz_norm(f, dp.s, p)?))
        })
        .collect();
    Ok(vals?.into_iter().fold((0.0, 0.0), |(a, b), (x, y)| (a.max(x), b.max(y))))
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    /// `d(u^{k+1}, u^k)` for each iteration.
    pub distances: Vec<f64>,
    /// `d_{k+1} / d_k`.
    pub ratios: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub beta: f64,
    pub norm_beta: f64,
    /// `None` when `gamma` does not define the Sobolev exponents.
    pub norm_delta_s: Option<f64>,
}

impl IterationReport {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub rule: Quadrature,
}

/// Iterates the Picard map from the linear trace on `nt` uniform samples of `[0, T]`.
pub fn solve_fixed_point(
    u0: &Field,
    cfg: &ModelConfig,
    t_final: f64,
    nt: usize,
    tol: f64,
    max_iter: usize,
) -> Result<(SolutionTrace, IterationReport)> {
    let model = Model::new(cfg, u0.grid())?;
    solve_fixed_point_with(&model, u0, t_final, nt, FixedPointOptions { tol, max_iter, rule: Quadrature::Simpson })
}

pub fn solve_fixed_point_with(
    model: &Model,
    u0: &Field,
    t_final: f64,
    nt: usize,
    opts: FixedPointOptions,
) -> Result<(SolutionTrace, IterationReport)> {
    if nt < 17 {
        return Err(Error::InvalidArgument(format!("nt = {nt} below the minimum of 17")));
    }
    if !(opts.tol > 0.0) || !(t_final > 0.0) {
        return Err(Error::InvalidArgument("tolerance and final time must be positive".into()));
    }
    let cfg = model.cfg();
    let beta = beta_exponent(cfg.n, cfg.d(), cfg.alpha);
    let mut u = SolutionTrace::linear(model, u0, SolutionTrace::uniform_times(t_final, nt))?;
    let mut distances: Vec<f64> = Vec::new();
    let mut converged = false;
    for k in 0..opts.max_iter {
        let next = picard_map_with(model, &u, u0, opts.rule)?;
        if next.fields.iter().any(|f| !f.is_finite()) {
            return Err(Error::NonFinite(format!("Picard iterate {} is not finite", k + 1)));
        }
        let d = xm_distance(&next, &u, beta)?;
        distances.push(d);
        u = next;
        if d <= opts.tol {
            converged = true;
            break;
        }
        let m = distances.len();
        if m >= 4 && distances[m - 1] >= 10.0 * distances[m - 4] {
            return Err(Error::Diverged { iterations: m, distance: d });
        }
    }
    let ratios = distances.windows(2).filter(|w| w[0] > 0.0).map(|w| w[1] / w[0]).collect();
    let p = cfg.alpha + 2.0;
    let mut norm_beta: f64 = 0.0;
    for (t, f) in u.times.iter().zip(&u.fields).skip(1) {
        norm_beta = norm_beta.max(t.powf(beta) * weak_lp_norm(f, p)?.norm);
    }
    let norm_delta_s = match derive_exponents(cfg) {
        Ok(dp) => Some(xm_norms(&u, &dp)?.1),
        Err(_) => None,
    };
    let iterations = distances.len();
    Ok((u, IterationReport { distances, ratios, converged, iterations, beta, norm_beta, norm_delta_s }))
}
