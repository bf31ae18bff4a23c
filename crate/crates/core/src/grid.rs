use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Periodic uniform lattice on `[-L_i/2, L_i/2)` along each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    sizes: Vec<usize>,
    extents: Vec<f64>,
}

impl Grid {
    pub fn new(sizes: &[usize], extents: &[f64]) -> Result<Self> {
        if sizes.is_empty() || sizes.len() > 3 {
            return Err(Error::InvalidGrid(format!("dimension {} not in 1..=3", sizes.len())));
        }
        if sizes.len() != extents.len() {
            return Err(Error::InvalidGrid("sizes and extents differ in length".into()));
        }
        for &n in sizes {
            if n < 8 || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!("axis size {n} must be even and >= 8")));
            }
        }
        for &l in extents {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidGrid(format!("extent {l} must be positive")));
            }
        }
        Ok(Grid { sizes: sizes.to_vec(), extents: extents.to_vec() })
    }

    /// Same size and extent on every axis.
    pub fn cubic(dim: usize, n: usize, extent: f64) -> Result<Self> {
        Grid::new(&vec![n; dim], &vec![extent; dim])
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn extents(&self) -> &[f64] {
        &self.extents
    }

    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.extents[axis] / self.sizes[axis] as f64
    }

    pub fn cell_measure(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    pub fn total_measure(&self) -> f64 {
        self.extents.iter().product()
    }

    /// Length of the cell diagonal.
    pub fn cell_diagonal(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a).powi(2)).sum::<f64>().sqrt()
    }

    pub fn coords(&self, axis: usize) -> Vec<f64> {
        let h = self.spacing(axis);
        let l = self.extents[axis];
        (0..self.sizes[axis]).map(|k| -l / 2.0 + k as f64 * h).collect()
    }

    /// FFT-ordered wavenumbers; the Nyquist index maps to `-N/2`.
    pub fn wavenumbers(&self, axis: usize) -> Vec<f64> {
        let n = self.sizes[axis] as i64;
        let dk = 2.0 * PI / self.extents[axis];
        (0..n).map(|k| if k < n / 2 { k } else { k - n } as f64 * dk).collect()
    }

    /// Largest `|xi|` on the grid (the corner Nyquist mode).
    pub fn max_wavenumber(&self) -> f64 {
        (0..self.dim())
            .map(|a| (PI * self.sizes[a] as f64 / self.extents[a]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Smallest nonzero `|xi|` on the grid.
    pub fn min_wavenumber(&self) -> f64 {
        self.extents.iter().map(|l| 2.0 * PI / l).fold(f64::INFINITY, f64::min)
    }

    /// Row-major strides (last axis contiguous).
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dim()];
        for a in (0..self.dim().saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.sizes[a + 1];
        }
        s
    }

    pub fn multi_index(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0; 3];
        for a in (0..self.dim()).rev() {
            idx[a] = flat % self.sizes[a];
            flat /= self.sizes[a];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(self.strides()).map(|(i, s)| i * s).sum()
    }

    /// Physical coordinates of every point, unused axes zero.
    pub fn points(&self) -> Vec<[f64; 3]> {
        let c: Vec<Vec<f64>> = (0..self.dim()).map(|a| self.coords(a)).collect();
        self.tabulate(&c)
    }

    /// Wavevector of every Fourier index, unused axes zero.
    pub fn wavevectors(&self) -> Vec<[f64; 3]> {
        let k: Vec<Vec<f64>> = (0..self.dim()).map(|a| self.wavenumbers(a)).collect();
        self.tabulate(&k)
    }

    fn tabulate(&self, axes: &[Vec<f64>]) -> Vec<[f64; 3]> {
        (0..self.len())
            .map(|f| {
                let idx = self.multi_index(f);
                let mut v = [0.0; 3];
                for a in 0..self.dim() {
                    v[a] = axes[a][idx[a]];
                }
                v
            })
            .collect()
    }
}

pub fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Complex samples on a grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("field contains NaN or infinity".into()));
        }
        Ok(Field { grid, values })
    }

    /// Skips the finiteness scan; callers guarantee the invariant.
    pub(crate) fn from_parts(grid: Grid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Field { grid, values }
    }

    pub fn zeros(grid: &Grid) -> Self {
        Field { grid: grid.clone(), values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn constant(grid: &Grid, c: Complex64) -> Self {
        Field { grid: grid.clone(), values: vec![c; grid.len()] }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64; 3]) -> Complex64) -> Self {
        let values = grid.points().iter().map(f).collect();
        Field { grid: grid.clone(), values }
    }

    pub fn from_real_fn(grid: &Grid, f: impl Fn(&[f64; 3]) -> f64) -> Self {
        Field::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// `e^{i xi . x}` for the integer mode `k` (per-axis index, may be negative).
    pub fn plane_wave(grid: &Grid, k: &[i64]) -> Self {
        let xi: Vec<f64> =
            (0..grid.dim()).map(|a| 2.0 * std::f64::consts::PI * k[a] as f64 / grid.extents()[a]).collect();
        Field::from_fn(grid, |x| {
            let ph: f64 = (0..grid.dim()).map(|a| xi[a] * x[a]).sum();
            Complex64::from_polar(1.0, ph)
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::ShapeMismatch("fields live on different grids".into()));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        Field { grid: self.grid.clone(), values: self.values.iter().map(|&z| f(z)).collect() }
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Field> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Field { grid: self.grid.clone(), values })
    }

    pub fn scale(&self, c: f64) -> Field {
        self.map(|z| z * c)
    }

    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    /// Discrete `L^2` norm, `(sum |f|^2 dV)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_measure()).sqrt()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        (self.values.iter().map(|z| z.norm().powf(p)).sum::<f64>() * self.grid.cell_measure()).powf(1.0 / p)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn at(&self, idx: &[usize]) -> Complex64 {
        self.values[self.grid.flat_index(idx)]
    }
}

fn binop(a: &Field, b: &Field, f: impl Fn(Complex64, Complex64) -> Complex64) -> Field {
    a.zip_map(b, f).expect("field arithmetic on mismatched grids")
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        binop(self, rhs, |a, b| a + b)
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        binop(self, rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, rhs: f64) -> Field {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(&[6], &[1.0]).is_err());
        assert!(Grid::new(&[9], &[1.0]).is_err());
        assert!(Grid::new(&[8], &[0.0]).is_err());
        assert!(Grid::new(&[8, 8, 8, 8], &[1.0; 4]).is_err());
        assert!(Grid::new(&[8, 8], &[1.0]).is_err());
    }

    #[test]
    fn wavenumbers_follow_fft_order() {
        let g = Grid::new(&[8], &[2.0 * PI]).unwrap();
        assert_eq!(g.wavenumbers(0), vec![0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]);
        assert_eq!(g.coords(0)[0], -PI);
    }

    #[test]
    fn measures() {
        let g = Grid::new(&[8, 16], &[2.0, 4.0]).unwrap();
        assert!((g.cell_measure() - 0.0625).abs() < 1e-15);
        assert_eq!(g.total_measure(), 8.0);
        assert_eq!(g.len(), 128);
        let f = g.flat_index(&[3, 5]);
        assert_eq!(g.multi_index(f)[..2], [3, 5]);
    }

    #[test]
    fn field_rejects_nan() {
        let g = Grid::cubic(1, 8, 1.0).unwrap();
        let mut v = vec![Complex64::new(0.0, 0.0); 8];
        v[2].re = f64::NAN;
        assert!(Field::new(g.clone(), v).is_err());
        assert!(Field::new(g, vec![Complex64::new(0.0, 0.0); 7]).is_err());
    }
}
