use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{norm3, Field, Grid};
use crate::smooth::smooth_step;
use crate::spectral::{power_profile, OriginRule};
use crate::Complex64;

/// Initial-data families used by the experiments and the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataSpec {
    /// `A exp(-|x - c|^2 / (2 sigma^2))`
    Gaussian {
        amplitude: f64,
        sigma: f64,
        #[serde(default)]
        center: Vec<f64>,
    },
    /// `A |x|^{-exponent}`; the origin sample follows the half-diagonal rule.
    Homogeneous { amplitude: f64, exponent: f64 },
    /// `A (|x|^2 + r0^2)^{-exponent/2}`, tapered to zero between
    /// `taper_start` and `taper_end` (fractions of the half-extent).
    SoftHomogeneous {
        amplitude: f64,
        exponent: f64,
        r0: f64,
        #[serde(default = "default_taper_start")]
        taper_start: f64,
        #[serde(default = "default_taper_end")]
        taper_end: f64,
    },
    /// `A e^{i xi . x}` for integer mode indices `k`.
    PlaneWave { amplitude: f64, k: Vec<i64> },
    /// Random band-limited mean-zero field, modes with `|k_i| <= modes`.
    /// A missing seed is filled from the run seed.
    Random {
        amplitude: f64,
        modes: usize,
        #[serde(default)]
        seed: Option<u64>,
    },
}

fn default_taper_start() -> f64 {
    0.6
}

fn default_taper_end() -> f64 {
    0.9
}

impl DataSpec {
    pub fn build(&self, grid: &Grid) -> Result<Field> {
        match self {
            DataSpec::Gaussian { amplitude, sigma, center } => {
                if !(*sigma > 0.0) {
                    return Err(Error::Config("gaussian sigma must be positive".into()));
                }
                Ok(gaussian(grid, *amplitude, *sigma, center))
            }
            DataSpec::Homogeneous { amplitude, exponent } => {
                Ok(power_profile(grid, *exponent, OriginRule::HalfDiagonal).scale(*amplitude))
            }
            DataSpec::SoftHomogeneous { amplitude, exponent, r0, taper_start, taper_end } => {
                if !(*taper_end > *taper_start && *taper_start > 0.0) {
                    return Err(Error::Config("taper_end must exceed taper_start > 0".into()));
                }
                let half = grid.extents().iter().copied().fold(f64::INFINITY, f64::min) / 2.0;
                let (r1, r2) = (taper_start * half, taper_end * half);
                Ok(Field::from_real_fn(grid, |x| {
                    let r = norm3(x);
                    amplitude * (r * r + r0 * r0).powf(-exponent / 2.0) * smooth_step((r - r1) / (r2 - r1))
                }))
            }
            DataSpec::PlaneWave { amplitude, k } => {
                if k.len() != grid.dim() {
                    return Err(Error::Config("plane wave index length must equal the dimension".into()));
                }
                Ok(Field::plane_wave(grid, k).scale(*amplitude))
            }
            DataSpec::Random { amplitude, modes, seed } => Ok(random_field(grid, *amplitude, *modes, seed.unwrap_or(0))),
        }
    }
}

pub fn gaussian(grid: &Grid, amplitude: f64, sigma: f64, center: &[f64]) -> Field {
    let c: Vec<f64> = (0..3).map(|a| center.get(a).copied().unwrap_or(0.0)).collect();
    Field::from_real_fn(grid, |x| {
        let r2: f64 = (0..3).map(|a| (x[a] - c[a]).powi(2)).sum();
        amplitude * (-r2 / (2.0 * sigma * sigma)).exp()
    })
}

/// Mean-zero trigonometric polynomial with Gaussian coefficients decaying like `(1+|k|^2)^{-1}`.
/// Depends only on the seed, the extents and `modes`, not on the resolution.
pub fn random_field(grid: &Grid, amplitude: f64, modes: usize, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = modes as i64;
    let mut terms: Vec<([f64; 3], Complex64)> = Vec::new();
    let dim = grid.dim();
    let count = (2 * m + 1).pow(dim as u32);
    for flat in 0..count {
        let mut k = [0i64; 3];
        let mut r = flat;
        for ka in k.iter_mut().take(dim) {
            *ka = (r % (2 * m + 1)) - m;
            r /= 2 * m + 1;
        }
        // draws happen for every index so the stream is resolution independent
        let re: f64 = rng.gen_range(-1.0..1.0);
        let im: f64 = rng.gen_range(-1.0..1.0);
        if k.iter().all(|&c| c == 0) {
            continue;
        }
        let mut xi = [0.0; 3];
        for a in 0..dim {
            xi[a] = 2.0 * PI * k[a] as f64 / grid.extents()[a];
        }
        let kk: f64 = k.iter().map(|c| (c * c) as f64).sum();
        terms.push((xi, Complex64::new(re, im) / (1.0 + kk)));
    }
    Field::from_fn(grid, |x| {
        let s: Complex64 =
            terms.iter().map(|(xi, c)| c * Complex64::from_polar(1.0, xi[0] * x[0] + xi[1] * x[1] + xi[2] * x[2])).sum();
        s * amplitude
    })
}
