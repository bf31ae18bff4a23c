use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares line through `(log t, log value)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    pub t_lo: f64,
    pub t_hi: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub sample_count: usize,
}

pub const MIN_FIT_SAMPLES: usize = 8;

pub fn fit_decay_exponent(times: &[f64], values: &[f64]) -> Result<RateFit> {
    if times.len() != values.len() {
        return Err(Error::InvalidArgument("times and values differ in length".into()));
    }
    if times.len() < MIN_FIT_SAMPLES {
        return Err(Error::InvalidArgument(format!("{} samples, need at least {MIN_FIT_SAMPLES}", times.len())));
    }
    if let Some(t) = times.iter().find(|&&t| !(t >= 1.0)) {
        return Err(Error::InvalidArgument(format!("fit time {t} below 1")));
    }
    if let Some(v) = values.iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidArgument(format!("fit value {v} is not positive")));
    }
    let x: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("fit times are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(&y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(RateFit {
        t_lo: times.iter().copied().fold(f64::INFINITY, f64::min),
        t_hi: times.iter().copied().fold(0.0, f64::max),
        slope,
        intercept,
        r_squared,
        sample_count: times.len(),
    })
}

/// `count` geometrically spaced times from `lo` to `hi` inclusive.
pub fn geometric_times(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let r = (hi / lo).ln() / (count - 1) as f64;
    (0..count)
        .map(|k| if k == count - 1 { hi } else { lo * (r * k as f64).exp() })
        .collect()
}

/// Relative deviation `|measured / expected - 1|`.
pub fn rel_dev(measured: f64, expected: f64) -> f64 {
    (measured / expected - 1.0).abs()
}
