//! Shared fixtures for the kernel benchmarks.

use dispersolve::experiments::data::gaussian;
use dispersolve::{Field, Grid, Model, ModelConfig};

/// Square grid of side `n` with a centred Gaussian on it.
pub fn gaussian_2d(n: usize) -> (Grid, Field) {
    let grid = Grid::cubic(2, n, 64.0).expect("grid");
    let u = gaussian(&grid, 0.3, 3.0, &[]);
    (grid, u)
}

/// Cubic-quintic Davey-Stewartson type model on `grid`.
pub fn ds_model(grid: &Grid) -> Model {
    let cfg = ModelConfig::new(
        2,
        dispersolve::DispersionSymbol::anisotropic2(1.0),
        dispersolve::MultiplierSpec::DaveyStewartson { m2: 1.0 },
        1.0,
        1.0,
        2.0,
        4.0,
    );
    Model::new(&cfg, grid).expect("model")
}
