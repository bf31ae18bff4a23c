//! Decreasing rearrangements, weak-`L^p` norms and Littlewood–Paley blocks.

use crate::error::{Error, Result};
use crate::grid::{norm3, Field, Grid};
use crate::smooth::smooth_step;
use crate::spectral::{from_fourier, riesz_derivative, to_fourier};

/// `|f|` sorted nonincreasing with the measure carried by each sample.
#[derive(Debug, Clone, PartialEq)]
pub struct RearrangementProfile {
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
    pub cum_measure: Vec<f64>,
}

impl RearrangementProfile {
    pub fn from_abs(mut values: Vec<f64>, cell: f64) -> Self {
        values.sort_unstable_by(|a, b| b.total_cmp(a));
        let weights = vec![cell; values.len()];
        let cum_measure = (1..=values.len()).map(|k| k as f64 * cell).collect();
        RearrangementProfile { values, weights, cum_measure }
    }

    pub fn total_measure(&self) -> f64 {
        self.cum_measure.last().copied().unwrap_or(0.0)
    }

    /// `f*(t)`; zero beyond the total measure.
    pub fn f_star(&self, t: f64) -> f64 {
        // first k with cum_measure[k] > t
        let k = self.cum_measure.partition_point(|&c| c <= t);
        self.values.get(k).copied().unwrap_or(0.0)
    }

    /// Prefix integrals `int_0^{t_k} f*`.
    pub fn prefix_integrals(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| {
                acc += v * w;
                acc
            })
            .collect()
    }

    /// `f**(t) = (1/t) int_0^t f*`, exact on the step function.
    pub fn f_star_star(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.values.first().copied().unwrap_or(0.0);
        }
        let k = self.cum_measure.partition_point(|&c| c <= t);
        let (before, start) = if k == 0 {
            (0.0, 0.0)
        } else {
            (self.values[..k].iter().zip(&self.weights[..k]).map(|(v, w)| v * w).sum(), self.cum_measure[k - 1])
        };
        let v = self.values.get(k).copied().unwrap_or(0.0);
        (before + v * (t - start)) / t
    }

    /// `alpha(lambda) = |{ f* > lambda }|`.
    pub fn distribution(&self, lambda: f64) -> f64 {
        let k = self.values.partition_point(|&v| v > lambda);
        if k == 0 {
            0.0
        } else {
            self.cum_measure[k - 1]
        }
    }
}

pub fn rearrange(f: &Field) -> RearrangementProfile {
    RearrangementProfile::from_abs(f.abs(), f.grid().cell_measure())
}

/// `alpha(lambda, f)` counted directly on the field samples.
pub fn distribution(f: &Field, lambda: f64) -> f64 {
    f.values().iter().filter(|z| z.norm() > lambda).count() as f64 * f.grid().cell_measure()
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("exponent p = {p} must lie in (1, inf)")));
    }
    Ok(())
}

/// `max_k v_k t_k^{1/p}` and the measure where it is attained.
pub fn quasinorm_of_profile(prof: &RearrangementProfile, p: f64) -> (f64, f64) {
    let mut best = (0.0, 0.0);
    for (v, t) in prof.values.iter().zip(&prof.cum_measure) {
        let q = v * t.powf(1.0 / p);
        if q > best.0 {
            best = (q, *t);
        }
    }
    best
}

pub fn weak_lp_quasinorm(f: &Field, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(quasinorm_of_profile(&rearrange(f), p).0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub quasi_norm: f64,
    pub norm: f64,
    pub p: f64,
    /// Measure at which the quasi-norm supremum is attained.
    pub quasi_attained_at: f64,
    /// Measure at which `t^{1/p} f**(t)` is largest.
    pub norm_attained_at: f64,
}

/// On `(t_{k-1}, t_k]` the function `t^{1/p} f**` is `c t^{1/p-1} + v t^{1/p}`.
/// Its only stationary point `c (p-1) / v` is a minimum, so the breakpoints
/// carry the sup; the stationary point is still evaluated for completeness.
pub fn norm_of_profile(prof: &RearrangementProfile, p: f64) -> (f64, f64) {
    let e = 1.0 / p;
    let mut best = (0.0, 0.0);
    let mut consider = |t: f64, val: f64| {
        if val > best.0 {
            best = (val, t);
        }
    };
    let mut prefix = 0.0;
    let mut start = 0.0;
    for ((&v, &w), &t) in prof.values.iter().zip(&prof.weights).zip(&prof.cum_measure) {
        let c = prefix - v * start;
        if v > 0.0 && c > 0.0 {
            let ts = c * (p - 1.0) / v;
            if ts > start && ts < t {
                consider(ts, c * ts.powf(e - 1.0) + v * ts.powf(e));
            }
        }
        prefix += v * w;
        consider(t, prefix * t.powf(e - 1.0));
        start = t;
    }
    best
}

pub fn weak_lp_norm(f: &Field, p: f64) -> Result<NormReport> {
    check_p(p)?;
    let prof = rearrange(f);
    Ok(report_of_profile(&prof, p))
}

pub fn report_of_profile(prof: &RearrangementProfile, p: f64) -> NormReport {
    let (quasi_norm, quasi_attained_at) = quasinorm_of_profile(prof, p);
    let (norm, norm_attained_at) = norm_of_profile(prof, p);
    NormReport { quasi_norm, norm, p, quasi_attained_at, norm_attained_at }
}

/// Largest value of `(fg)*(s + t) - f*(s) g*(t)` over grid breakpoints.
/// Nonpositive whenever the pointwise rearrangement inequality holds.
pub fn oneil_max_violation(f: &Field, g: &Field) -> Result<f64> {
    f.check_same_grid(g)?;
    let fa = f.abs();
    let ga = g.abs();
    let prod: Vec<f64> = fa.iter().zip(&ga).map(|(a, b)| a * b).collect();
    let cell = f.grid().cell_measure();
    let pf = RearrangementProfile::from_abs(fa, cell).values;
    let pg = RearrangementProfile::from_abs(ga, cell).values;
    let pp = RearrangementProfile::from_abs(prod, cell).values;
    let n = pp.len();
    let mut worst = f64::NEG_INFINITY;
    for i in 0..n {
        for j in 0..n - i {
            worst = worst.max(pp[i + j] - pf[i] * pg[j]);
        }
    }
    Ok(worst)
}

/// Low-pass bump: 1 on `r <= 1`, 0 on `r >= 2`.
pub fn phi_hat(r: f64) -> f64 {
    smooth_step(r - 1.0)
}

/// Dyadic annulus `phi_hat(r) - phi_hat(2r)`, supported in `[1/2, 2]`.
pub fn psi_hat(r: f64) -> f64 {
    phi_hat(r) - phi_hat(2.0 * r)
}

/// Block indices whose annuli meet the nonzero grid wavenumbers.
pub fn block_range(grid: &Grid) -> (i32, i32) {
    let lo = grid.min_wavenumber().log2().floor() as i32 - 1;
    let hi = grid.max_wavenumber().log2().floor() as i32 + 1;
    (lo, hi)
}

fn block_table(grid: &Grid, j: i32) -> Vec<f64> {
    let scale = 2f64.powi(-j);
    grid.wavevectors().iter().map(|xi| psi_hat(scale * norm3(xi))).collect()
}

/// Littlewood–Paley piece `Delta_j f`, multiplier `psi_hat(2^{-j} xi)`.
pub fn lp_block(f: &Field, j: i32) -> Field {
    let mut c = to_fourier(f);
    c.iter_mut().zip(block_table(f.grid(), j)).for_each(|(z, m)| *z *= m);
    from_fourier(f.grid(), c)
}

/// All blocks in `block_range`, sharing one forward transform.
pub fn lp_blocks(f: &Field) -> Vec<(i32, Field)> {
    let (lo, hi) = block_range(f.grid());
    let c = to_fourier(f);
    (lo..=hi)
        .map(|j| {
            let m = block_table(f.grid(), j);
            let cj = c.iter().zip(&m).map(|(z, m)| z * m).collect();
            (j, from_fourier(f.grid(), cj))
        })
        .collect()
}

/// `|| Lambda^s f ||` in the f**-based weak-`L^p` norm.
pub fn sobolev_lorentz_norm(f: &Field, s: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(weak_lp_norm(&riesz_derivative(f, s)?, p)?.norm)
}

/// Weak-`L^p` norm of the square function `(sum_j 4^{js} |Delta_j f|^2)^{1/2}`.
pub fn lp_square_norm(f: &Field, s: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    let mut acc = vec![0.0; f.grid().len()];
    for (j, b) in lp_blocks(f) {
        let w = 2f64.powf(2.0 * j as f64 * s);
        acc.iter_mut().zip(b.values()).for_each(|(a, z)| *a += w * z.norm_sqr());
    }
    let sq: Vec<f64> = acc.into_iter().map(f64::sqrt).collect();
    Ok(norm_of_profile(&RearrangementProfile::from_abs(sq, f.grid().cell_measure()), p).0)
}
