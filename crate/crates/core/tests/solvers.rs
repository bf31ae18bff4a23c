mod common;

use common::*;
use dispersolve::duhamel::{
    duhamel_integral, picard_map, solve_fixed_point, xm_distance, xm_norms, Quadrature, SolutionTrace,
};
use dispersolve::params::derive_exponents;
use dispersolve::reference::{evolve, strang_step, strang_step_model, EvolveSpec};
use dispersolve::{Complex64, Error, Field, Grid, Model, ModelConfig};
use proptest::prelude::*;

fn grid1() -> Grid {
    Grid::new(&[256], &[40.0]).unwrap()
}

fn cubic_1d() -> ModelConfig {
    ModelConfig::nls(1, 1.0, 0.0, 2.0, 3.0)
}

fn bump(grid: &Grid, amp: f64) -> Field {
    Field::from_real_fn(grid, |x| amp * (-x[0] * x[0]).exp())
}

#[test]
fn duhamel_of_plane_wave_is_exact() {
    // |u| is constant, so N(u) = a eps^2 u and B(u)(t) = -i a eps^2 t u(t).
    let g = Grid::cubic(1, 32, 2.0 * std::f64::consts::PI).unwrap();
    let cfg = ModelConfig::nls(1, 0.7, 0.0, 2.0, 3.0);
    let model = Model::new(&cfg, &g).unwrap();
    let eps = 0.1;
    let u0 = Field::plane_wave(&g, &[3]).scale(eps);
    let tr = SolutionTrace::linear(&model, &u0, SolutionTrace::uniform_times(2.0, 21)).unwrap();
    for j in [2usize, 7, 20] {
        let t = tr.times[j];
        let b = duhamel_integral(&model, &tr, t, Quadrature::Simpson).unwrap();
        let expect = tr.fields[j].map(|z| z * Complex64::new(0.0, -0.7 * eps * eps * t));
        assert!(rel(&b, &expect) < 1e-12, "t = {t}");
    }
}

#[test]
fn duhamel_matches_tenfold_refinement() {
    let g = grid1();
    let cfg = cubic_1d();
    let model = Model::new(&cfg, &g).unwrap();
    let u0 = bump(&g, 0.05);
    // the Gaussian reaches |q| ~ 100 in the nonlinearity, so the trace has to resolve e^{isq}
    let coarse = SolutionTrace::linear(&model, &u0, SolutionTrace::uniform_times(1.0, 161)).unwrap();
    let fine = SolutionTrace::linear(&model, &u0, SolutionTrace::uniform_times(1.0, 1601)).unwrap();
    let a = duhamel_integral(&model, &coarse, 1.0, Quadrature::Simpson).unwrap();
    let b = duhamel_integral(&model, &fine, 1.0, Quadrature::Simpson).unwrap();
    assert!(rel(&a, &b) < 1e-6, "{}", rel(&a, &b));
}

#[test]
fn duhamel_rejects_short_or_foreign_times() {
    let g = grid1();
    let model = Model::new(&cubic_1d(), &g).unwrap();
    let tr = SolutionTrace::linear(&model, &bump(&g, 0.05), SolutionTrace::uniform_times(1.0, 11)).unwrap();
    assert!(duhamel_integral(&model, &tr, 0.1, Quadrature::Simpson).is_err());
    assert!(duhamel_integral(&model, &tr, 0.55, Quadrature::Simpson).is_err());
    assert!(duhamel_integral(&model, &tr, 1.5, Quadrature::Simpson).is_err());
    let zero = SolutionTrace::linear(&model, &Field::zeros(&g), SolutionTrace::uniform_times(1.0, 11)).unwrap();
    assert_eq!(duhamel_integral(&model, &zero, 1.0, Quadrature::Simpson).unwrap().max_abs(), 0.0);
}

#[test]
fn free_equation_fixed_point_is_linear_flow() {
    let g = grid1();
    let cfg = ModelConfig::nls(1, 0.0, 0.0, 2.0, 3.0);
    let u0 = bump(&g, 1.0);
    let (tr, rep) = solve_fixed_point(&u0, &cfg, 1.0, 17, 1e-14, 10).unwrap();
    assert!(rep.converged && rep.iterations == 1);
    let model = Model::new(&cfg, &g).unwrap();
    assert!(rel(tr.last(), &model.propagate(&u0, 1.0).unwrap()) < 1e-13);
}

#[test]
fn fixed_point_solves_discrete_equation() {
    let g = grid1();
    let cfg = cubic_1d();
    let u0 = bump(&g, 0.05);
    let tol = 1e-12;
    let (tr, rep) = solve_fixed_point(&u0, &cfg, 1.0, 33, tol, 60).unwrap();
    assert!(rep.converged);
    let model = Model::new(&cfg, &g).unwrap();
    let again = picard_map(&model, &tr, &u0).unwrap();
    assert!(xm_distance(&again, &tr, rep.beta).unwrap() <= 2.0 * tol);
}

#[test]
fn first_correction_scales_with_cube_of_amplitude() {
    let g = grid1();
    let cfg = cubic_1d();
    let model = Model::new(&cfg, &g).unwrap();
    let correction = |amp: f64| {
        let u0 = bump(&g, amp);
        let lin = SolutionTrace::linear(&model, &u0, SolutionTrace::uniform_times(1.0, 17)).unwrap();
        let next = picard_map(&model, &lin, &u0).unwrap();
        (next.last() - lin.last()).l2_norm()
    };
    let r = correction(0.1) / correction(0.05);
    assert!((r / 8.0 - 1.0).abs() < 0.1, "{r}");
}

#[test]
fn contraction_ratios_grow_with_amplitude() {
    let g = grid1();
    let cfg = cubic_1d();
    let mut last = 0.0;
    for amp in [0.05, 0.2, 0.4] {
        let (_, rep) = solve_fixed_point(&bump(&g, amp), &cfg, 1.0, 17, 1e-12, 80).unwrap();
        assert!(rep.converged && rep.max_ratio() < 1.0, "{amp}");
        assert!(rep.max_ratio() > last, "{amp}");
        last = rep.max_ratio();
    }
}

#[test]
fn large_data_is_reported_as_divergent() {
    let g = grid1();
    let cfg = ModelConfig::nls(1, 1.0, 0.0, 2.0, 3.0);
    match solve_fixed_point(&bump(&g, 6.0), &cfg, 4.0, 17, 1e-12, 60) {
        Err(Error::Diverged { .. }) | Err(Error::NonFinite(_)) => {}
        other => panic!("expected divergence, got {:?}", other.map(|r| r.1.converged)),
    }
}

#[test]
fn time_refinement_order() {
    let g = grid1();
    let cfg = cubic_1d();
    let u0 = bump(&g, 0.3);
    let end = |nt: usize| solve_fixed_point(&u0, &cfg, 1.0, nt, 1e-14, 80).unwrap().0.last().clone();
    let (a, b, c) = (end(17), end(33), end(65));
    let order = ((&a - &b).l2_norm() / (&b - &c).l2_norm()).log2();
    assert!(order >= 3.5, "order {order}");
}

#[test]
fn weighted_norms_of_zero_and_scaled_traces() {
    let g = Grid::cubic(2, 32, 20.0).unwrap();
    let cfg = ModelConfig::nls(2, 1.0, 1.0, 2.0, 4.0);
    let dp = derive_exponents(&cfg).unwrap();
    let model = Model::new(&cfg, &g).unwrap();
    let u0 = Field::from_real_fn(&g, |x| (-(x[0] * x[0] + x[1] * x[1]) / 4.0).exp());
    let tr = SolutionTrace::linear(&model, &u0, SolutionTrace::uniform_times(2.0, 9)).unwrap();
    let zero = tr.scale(0.0);
    assert_eq!(xm_norms(&zero, &dp).unwrap(), (0.0, 0.0));
    let (a, b) = xm_norms(&tr, &dp).unwrap();
    let (a2, b2) = xm_norms(&tr.scale(2.0), &dp).unwrap();
    assert!((a2 - 2.0 * a).abs() < 1e-12 * a && (b2 - 2.0 * b).abs() < 1e-12 * b);
}

fn trace_triple() -> impl Strategy<Value = (SolutionTrace, SolutionTrace, SolutionTrace)> {
    grid_of(1).prop_flat_map(|g| {
        let f = move || prop::collection::vec(field_on(g.clone()), 4);
        (f(), f(), f())
    })
    .prop_map(|(a, b, c)| {
        let cfg = ModelConfig::nls(1, 1.0, 0.0, 2.0, 3.0);
        let times = vec![0.0, 0.5, 1.0, 1.5];
        let mk = |v: Vec<Field>| SolutionTrace::new(times.clone(), v, cfg.clone()).unwrap();
        (mk(a), mk(b), mk(c))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn distance_is_a_metric((u, v, w) in trace_triple(), beta in 0.0f64..1.0) {
        prop_assert_eq!(xm_distance(&u, &u, beta).unwrap(), 0.0);
        let uv = xm_distance(&u, &v, beta).unwrap();
        prop_assert!((uv - xm_distance(&v, &u, beta).unwrap()).abs() <= 1e-14 * uv);
        let uw = xm_distance(&u, &w, beta).unwrap();
        let wv = xm_distance(&w, &v, beta).unwrap();
        prop_assert!(uv <= (uw + wv) * (1.0 + 1e-12));
        let scaled = xm_distance(&u.scale(2.0), &v.scale(2.0), beta).unwrap();
        prop_assert!((scaled - 2.0 * uv).abs() <= 1e-12 * uv);
    }

    #[test]
    fn strang_step_preserves_mass(f in grid_of(2).prop_flat_map(field_on), dt in 0.001f64..0.5) {
        let cfg = ModelConfig::nls(2, -1.0, 0.5, 2.0, 4.0);
        let g = strang_step(&f, &cfg, dt).unwrap();
        prop_assert!((g.l2_norm() / f.l2_norm() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn long_run_mass_drift() {
    let g = grid1();
    let cfg = cubic_1d();
    let model = Model::new(&cfg, &g).unwrap();
    let mut f = bump(&g, 1.0);
    let m0 = f.l2_norm();
    for _ in 0..10_000 {
        f = strang_step_model(&model, &f, 1e-3).unwrap();
    }
    assert!(((f.l2_norm() / m0).powi(2) - 1.0).abs() <= 1e-10);
}

#[test]
fn free_steps_match_propagator() {
    let g = grid1();
    let cfg = ModelConfig::nls(1, 0.0, 0.0, 2.0, 3.0);
    let u0 = bump(&g, 1.0);
    let snaps = vec![0.0, 0.3, 1.0, 2.5];
    let tr = evolve(&u0, &cfg, &EvolveSpec::new(2.5, 0.07, snaps.clone())).unwrap();
    let model = Model::new(&cfg, &g).unwrap();
    for (t, f) in snaps.iter().zip(&tr.fields) {
        assert!(rel(f, &model.propagate(&u0, *t).unwrap()) < 1e-10);
    }
    let zero = evolve(&Field::zeros(&g), &cubic_1d(), &EvolveSpec::new(1.0, 0.1, vec![1.0])).unwrap();
    assert_eq!(zero.last().max_abs(), 0.0);
}

#[test]
fn composite_step_is_invertible() {
    let g = grid1();
    let model = Model::new(&cubic_1d(), &g).unwrap();
    let u0 = bump(&g, 1.0);
    let mut f = u0.clone();
    for _ in 0..100 {
        f = strang_step_model(&model, &f, 0.01).unwrap();
    }
    for _ in 0..100 {
        f = strang_step_model(&model, &f, -0.01).unwrap();
    }
    assert!(rel(&f, &u0) < 1e-8);
}

#[test]
fn strang_refinement_constant_is_stable() {
    let g = grid1();
    let cfg = cubic_1d();
    let u0 = bump(&g, 0.5);
    let snaps = vec![0.5, 1.0, 1.5, 2.0];
    let run = |dt: f64| evolve(&u0, &cfg, &EvolveSpec::new(2.0, dt, snaps.clone())).unwrap();
    let dt = 0.02;
    let (a, b) = (run(dt), run(dt / 2.0));
    let consts: Vec<f64> = a.fields.iter().zip(&b.fields).map(|(x, y)| (x - y).l2_norm() / (dt * dt)).collect();
    let (lo, hi) = consts.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &c| (l.min(c), h.max(c)));
    assert!(hi / lo < 10.0, "{consts:?}");
}

#[test]
fn splitting_rejects_complex_coefficients() {
    let g = grid1();
    let mut cfg = cubic_1d();
    cfg.a = Complex64::new(1.0, 0.5);
    assert!(strang_step(&bump(&g, 1.0), &cfg, 0.1).is_err());
    assert!(strang_step(&bump(&g, 1.0), &cubic_1d(), 0.0).is_err());
}
