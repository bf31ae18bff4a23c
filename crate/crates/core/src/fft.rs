//! n-dimensional complex FFT on row-major buffers, built from 1-D rustfft plans.
//!
//! Forward is unnormalized, inverse divides by the number of points, so
//! `inverse(forward(f)) == f`.

use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::grid::Grid;

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static P: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    P.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn plan(n: usize, dir: FftDirection) -> Arc<dyn Fft<f64>> {
    planner().lock().expect("fft planner poisoned").plan_fft(n, dir)
}

// Below this many points the rayon overhead dominates.
const PAR_MIN: usize = 1 << 14;

fn transform(grid: &Grid, data: &mut [Complex64], dir: FftDirection) {
    assert_eq!(data.len(), grid.len());
    let sizes = grid.sizes();
    let total = data.len();
    for axis in 0..sizes.len() {
        let n = sizes[axis];
        let fft = plan(n, dir);
        let inner: usize = sizes[axis + 1..].iter().product();
        if inner == 1 {
            run_lines(&*fft, data, n);
            continue;
        }
        // Gather the axis lines into contiguous rows, transform, scatter back.
        let outer = total / (n * inner);
        let mut buf = vec![Complex64::new(0.0, 0.0); total];
        {
            let src: &[Complex64] = data;
            let gather = |(line, row): (usize, &mut [Complex64])| {
                let (o, i) = (line / inner, line % inner);
                let base = o * n * inner + i;
                for (k, z) in row.iter_mut().enumerate() {
                    *z = src[base + k * inner];
                }
            };
            if total >= PAR_MIN {
                buf.par_chunks_mut(n).enumerate().for_each(gather);
            } else {
                buf.chunks_mut(n).enumerate().for_each(gather);
            }
        }
        run_lines(&*fft, &mut buf, n);
        let scatter = |(o, block): (usize, &mut [Complex64])| {
            for i in 0..inner {
                let row = &buf[(o * inner + i) * n..(o * inner + i + 1) * n];
                for (k, z) in row.iter().enumerate() {
                    block[k * inner + i] = *z;
                }
            }
        };
        if total >= PAR_MIN && outer > 1 {
            data.par_chunks_mut(n * inner).enumerate().for_each(scatter);
        } else {
            data.chunks_mut(n * inner).enumerate().for_each(scatter);
        }
    }
}

fn run_lines(fft: &dyn Fft<f64>, data: &mut [Complex64], n: usize) {
    if data.len() >= PAR_MIN {
        // Batches of lines per task keep scratch allocation amortized.
        let lines_per_task = (PAR_MIN / n).max(1);
        data.par_chunks_mut(n * lines_per_task).for_each(|chunk| fft.process(chunk));
    } else {
        fft.process(data);
    }
}

pub fn forward(grid: &Grid, data: &mut [Complex64]) {
    transform(grid, data, FftDirection::Forward);
}

pub fn inverse(grid: &Grid, data: &mut [Complex64]) {
    transform(grid, data, FftDirection::Inverse);
    let s = 1.0 / data.len() as f64;
    data.iter_mut().for_each(|z| *z *= s);
}
