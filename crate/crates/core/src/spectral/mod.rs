//! Fourier multipliers, the free propagator and the symbol catalog.

mod fresnel;
mod multipliers;
mod symbols;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use fresnel::{fresnel_quadrature, fresnel_reference};
pub use multipliers::MultiplierSpec;
pub use symbols::{DispersionSymbol, SymbolKind};

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{norm3, Field, Grid};

fn check_arity(grid: &Grid, arity: Option<usize>, what: &str) -> Result<()> {
    match arity {
        Some(n) if n != grid.dim() => {
            Err(Error::ShapeMismatch(format!("{what} needs dimension {n}, grid has {}", grid.dim())))
        }
        _ => Ok(()),
    }
}

/// Forward transform of a field (unnormalized).
pub fn to_fourier(f: &Field) -> Vec<Complex64> {
    let mut v = f.values().to_vec();
    fft::forward(f.grid(), &mut v);
    v
}

/// Inverse transform back to a field.
pub fn from_fourier(grid: &Grid, mut coeffs: Vec<Complex64>) -> Field {
    fft::inverse(grid, &mut coeffs);
    Field::from_parts(grid.clone(), coeffs)
}

/// `ifft(m . fft(f))` for a tabulated symbol in FFT order.
pub fn fourier_multiply(f: &Field, symbol: &[Complex64]) -> Result<Field> {
    if symbol.len() != f.grid().len() {
        return Err(Error::ShapeMismatch("symbol table does not match grid".into()));
    }
    let mut c = to_fourier(f);
    c.iter_mut().zip(symbol).for_each(|(z, m)| *z *= m);
    Ok(from_fourier(f.grid(), c))
}

fn real_multiply(f: &Field, symbol: &[f64]) -> Field {
    let mut c = to_fourier(f);
    c.iter_mut().zip(symbol).for_each(|(z, m)| *z *= m);
    from_fourier(f.grid(), c)
}

/// Tabulates a real symbol over the grid wavevectors.
pub fn tabulate(grid: &Grid, sym: impl Fn(&[f64; 3]) -> f64) -> Vec<f64> {
    grid.wavevectors().iter().map(sym).collect()
}

/// Multiplier values on the grid, checked for finiteness.
pub fn multiplier_table(grid: &Grid, m: &MultiplierSpec) -> Result<Vec<f64>> {
    check_arity(grid, m.arity(), m.name())?;
    let t = tabulate(grid, |xi| m.eval(xi));
    if let Some(bad) = t.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("{} symbol is not finite at index {bad}", m.name())));
    }
    Ok(t)
}

pub fn apply_multiplier(f: &Field, m: &MultiplierSpec) -> Result<Field> {
    if matches!(m, MultiplierSpec::Identity) {
        check_arity(f.grid(), None, "identity")?;
    }
    let t = multiplier_table(f.grid(), m)?;
    Ok(real_multiply(f, &t))
}

/// `max |m(xi)|` over the grid.
pub fn multiplier_bound(grid: &Grid, m: &MultiplierSpec) -> Result<f64> {
    Ok(multiplier_table(grid, m)?.iter().fold(0.0, |a, v| a.max(v.abs())))
}

/// Dispersion symbol tabulated on a grid, reusable across many time steps.
#[derive(Debug, Clone)]
pub struct Propagator {
    grid: Grid,
    q: Vec<f64>,
}

impl Propagator {
    pub fn new(grid: &Grid, q: &DispersionSymbol) -> Result<Self> {
        check_arity(grid, q.arity(), q.name())?;
        let table = tabulate(grid, |xi| q.eval(xi));
        if table.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("{} symbol is not finite", q.name())));
        }
        Ok(Propagator { grid: grid.clone(), q: table })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn symbol(&self) -> &[f64] {
        &self.q
    }

    /// Multiplies Fourier coefficients by `e^{i t q}` in place.
    pub fn evolve_coeffs(&self, coeffs: &mut [Complex64], t: f64) {
        coeffs.iter_mut().zip(&self.q).for_each(|(z, &q)| *z *= Complex64::from_polar(1.0, t * q));
    }

    pub fn apply(&self, f: &Field, t: f64) -> Result<Field> {
        if f.grid() != &self.grid {
            return Err(Error::ShapeMismatch("field grid differs from propagator grid".into()));
        }
        if t == 0.0 {
            return Ok(f.clone());
        }
        let mut c = to_fourier(f);
        self.evolve_coeffs(&mut c, t);
        Ok(from_fourier(&self.grid, c))
    }
}

/// Free evolution `U(t) f = ifft(e^{i t q} fft f)`.
pub fn propagate(f: &Field, q: &DispersionSymbol, t: f64) -> Result<Field> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time {t} is not finite")));
    }
    Propagator::new(f.grid(), q)?.apply(f, t)
}

/// Relative size of the mean below which a negative-order Riesz potential is accepted.
pub const MEAN_TOLERANCE: f64 = 1e-10;

/// `Lambda^s`, multiplier `|xi|^s` with the zero mode dropped.
pub fn riesz_derivative(f: &Field, s: f64) -> Result<Field> {
    let n = f.grid().dim() as f64;
    if !s.is_finite() || s <= -n {
        return Err(Error::InvalidArgument(format!("Riesz order {s} must exceed -{n}")));
    }
    if s == 0.0 {
        return Ok(f.clone());
    }
    if s < 0.0 {
        let scale = f.l2_norm() / f.grid().total_measure().sqrt();
        let mean = f.mean().norm();
        if mean > MEAN_TOLERANCE * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidArgument(format!(
                "Riesz potential of order {s} needs a mean-zero field (mean {mean:e})"
            )));
        }
    }
    let t = tabulate(f.grid(), |xi| {
        let r = norm3(xi);
        if r == 0.0 {
            0.0
        } else {
            r.powf(s)
        }
    });
    Ok(real_multiply(f, &t))
}

/// `J^s`, multiplier `(1 + |xi|^2)^{s/2}`.
pub fn bessel_potential(f: &Field, s: f64) -> Field {
    if s == 0.0 {
        return f.clone();
    }
    let t = tabulate(f.grid(), |xi| (1.0 + xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).powf(s / 2.0));
    real_multiply(f, &t)
}

/// 2/3-rule truncation: zero every mode with `|k_i| > N_i / 3` on some axis.
pub fn dealias(f: &Field) -> Field {
    let g = f.grid();
    let cut: Vec<f64> = (0..g.dim()).map(|a| 2.0 * std::f64::consts::PI / g.extents()[a] * (g.sizes()[a] / 3) as f64).collect();
    let t = tabulate(g, |xi| if (0..g.dim()).all(|a| xi[a].abs() <= cut[a] + 1e-12) { 1.0 } else { 0.0 });
    real_multiply(f, &t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneityReport {
    pub max_rel_error: f64,
    pub samples_used: usize,
    pub samples_skipped: usize,
}

/// Samples `q(lambda xi) / (lambda^d q(xi)) - 1` at random `xi` and `lambda in [0.1, 10]`.
pub fn check_homogeneity(q: &DispersionSymbol, dim: usize, sample_count: usize, seed: u64) -> Result<HomogeneityReport> {
    if sample_count < 10 {
        return Err(Error::InvalidArgument("at least 10 samples required".into()));
    }
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidArgument(format!("dimension {dim} not in 1..=3")));
    }
    let dim = q.arity().unwrap_or(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = HomogeneityReport { max_rel_error: 0.0, samples_used: 0, samples_skipped: 0 };
    for _ in 0..sample_count {
        let mut xi = [0.0; 3];
        for c in xi.iter_mut().take(dim) {
            *c = rng.gen_range(-10.0..10.0);
        }
        let lam = 10f64.powf(rng.gen_range(-1.0..1.0));
        let base = q.eval(&xi);
        if base.abs() < 1e-14 {
            rep.samples_skipped += 1;
            continue;
        }
        let scaled = q.eval(&[lam * xi[0], lam * xi[1], lam * xi[2]]);
        let err = (scaled / (lam.powf(q.degree) * base) - 1.0).abs();
        rep.max_rel_error = rep.max_rel_error.max(err);
        rep.samples_used += 1;
    }
    Ok(rep)
}

/// How the singular point of `|x|^{-k}` is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OriginRule {
    /// Value at distance `h/2`, `h` the cell diagonal.
    HalfDiagonal,
    /// Zero at the origin (equal almost everywhere to the singular function).
    Zero,
}

/// `|x|^{-k}` sampled on the grid.
pub fn power_profile(grid: &Grid, k: f64, origin: OriginRule) -> Field {
    let at0 = match origin {
        OriginRule::HalfDiagonal => (grid.cell_diagonal() / 2.0).powf(-k),
        OriginRule::Zero => 0.0,
    };
    Field::from_real_fn(grid, |x| {
        let r = norm3(x);
        if r == 0.0 {
            at0
        } else {
            r.powf(-k)
        }
    })
}
