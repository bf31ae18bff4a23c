#![allow(dead_code)]

use dispersolve::{Complex64, DispersionSymbol, Field, Grid, MultiplierSpec};
use proptest::prelude::*;

/// Small grid of dimension 1..=3 with random extents.
pub fn small_grid() -> impl Strategy<Value = Grid> {
    (1usize..=3, prop::sample::select(vec![8usize, 16]), 1.0f64..20.0).prop_map(|(dim, n, l)| {
        let n = if dim == 3 { 8 } else { n };
        Grid::cubic(dim, n, l).unwrap()
    })
}

pub fn grid_of(dim: usize) -> impl Strategy<Value = Grid> {
    (prop::sample::select(vec![8usize, 16]), 1.0f64..20.0).prop_map(move |(n, l)| Grid::cubic(dim, n, l).unwrap())
}

pub fn field_on(grid: Grid) -> impl Strategy<Value = Field> {
    let len = grid.len();
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(move |v| Field::new(grid.clone(), v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
}

pub fn real_field_on(grid: Grid) -> impl Strategy<Value = Field> {
    let len = grid.len();
    prop::collection::vec(-1.0f64..1.0, len)
        .prop_map(move |v| Field::new(grid.clone(), v.into_iter().map(|a| Complex64::new(a, 0.0)).collect()).unwrap())
}

pub fn any_field() -> impl Strategy<Value = Field> {
    small_grid().prop_flat_map(field_on)
}

pub fn mean_zero(f: &Field) -> Field {
    let m = f.mean();
    f.map(|z| z - m)
}

/// Symbols valid in `dim` dimensions.
pub fn symbol_for(dim: usize) -> impl Strategy<Value = DispersionSymbol> {
    let mut opts: Vec<BoxedStrategy<DispersionSymbol>> =
        vec![Just(DispersionSymbol::laplacian()).boxed(), (0.1f64..3.0).prop_map(DispersionSymbol::biharmonic).boxed()];
    if dim == 2 {
        opts.push((-3.0f64..3.0).prop_map(DispersionSymbol::anisotropic2).boxed());
    }
    if dim == 3 {
        opts.push(
            (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0)
                .prop_map(|(a, b, c, d)| DispersionSymbol::shrira(a, b, c, d))
                .boxed(),
        );
    }
    prop::strategy::Union::new(opts)
}

pub fn multipliers_for(dim: usize) -> Vec<MultiplierSpec> {
    let mut v = vec![MultiplierSpec::Identity];
    if dim == 2 {
        v.push(MultiplierSpec::DaveyStewartson { m2: 1.5 });
        v.push(MultiplierSpec::GeneralizedDs { lambda: 2.0, ell: 1.0, m2: 0.5, m3: 1.5 });
    }
    if dim == 3 {
        v.push(MultiplierSpec::Shrira { nu: 0.7 });
        v.push(MultiplierSpec::Dipolar);
    }
    v
}

pub fn rel(a: &Field, b: &Field) -> f64 {
    (a - b).l2_norm() / b.l2_norm().max(f64::MIN_POSITIVE)
}
