use dispersolve::experiments::config::{run_check_model, run_evolve, run_experiment, run_norms, run_picard, ExperimentConfig};
use dispersolve::experiments::data::gaussian;
use dispersolve::experiments::dispersive::{exp_dispersive, DecayNorm, DispersiveParams};
use dispersolve::experiments::fit::{fit_decay_exponent, geometric_times};
use dispersolve::experiments::leibniz::{exp_leibniz, leibniz_ratios, LeibnizParams};
use dispersolve::experiments::scattering::{exp_scattering, ScatterParams};
use dispersolve::experiments::selfsim::scaling_mismatch;
use dispersolve::experiments::stability::{exp_stability, StabilityParams};
use dispersolve::spectral::{power_profile, propagate, OriginRule};
use dispersolve::{DispersionSymbol, Field, Grid, Model, ModelConfig};

#[test]
fn fits_of_synthetic_laws() {
    let t = geometric_times(4.0, 64.0, 16);
    let exact: Vec<f64> = t.iter().map(|t| 2.0 * t.powf(-0.37)).collect();
    assert!((fit_decay_exponent(&t, &exact).unwrap().slope + 0.37).abs() < 1e-10);
    let flat = vec![1.5; t.len()];
    assert!(fit_decay_exponent(&t, &flat).unwrap().slope.abs() < 1e-12);
    let wobble: Vec<f64> = t.iter().map(|t| 3.0 * t.powf(-0.25) * (1.0 + 0.01 * t.ln().sin())).collect();
    assert!((fit_decay_exponent(&t, &wobble).unwrap().slope + 0.25).abs() < 0.01);
    assert!(fit_decay_exponent(&t[..7], &exact[..7]).is_err());
    let mut bad = exact.clone();
    bad[3] = 0.0;
    assert!(fit_decay_exponent(&t, &bad).is_err());
    let early: Vec<f64> = (0..10).map(|k| 0.5 + k as f64).collect();
    assert!(fit_decay_exponent(&early, &[1.0; 10]).is_err());
}

#[test]
fn dispersive_rate_is_autonomous() {
    let g = Grid::new(&[2048], &[800.0]).unwrap();
    let q = DispersionSymbol::laplacian();
    let u0 = gaussian(&g, 1.0, 1.0, &[]);
    let params = DispersiveParams { times: geometric_times(4.0, 64.0, 16), norm: DecayNorm::Sup, slope_tolerance: 0.05 };
    let a = exp_dispersive(&q, &u0, &params).unwrap();
    // shifting the data in time shifts the closed-form peak |u(t)| = (1 + 4t^2)^(-1/4)
    for shift in [0.0, 1.0] {
        let run = exp_dispersive(&q, &propagate(&u0, &q, shift).unwrap(), &params).unwrap();
        let exact: Vec<f64> = params.times.iter().map(|t| (1.0 + 4.0 * (t + shift).powi(2)).powf(-0.25)).collect();
        let want = fit_decay_exponent(&params.times, &exact).unwrap().slope;
        assert!((run.fit.slope / want - 1.0).abs() < 0.01, "{} vs {want}", run.fit.slope);
    }
    assert!(a.passed());
    assert_eq!(a.output().columns, vec!["t", "norm", "fitted_slope"]);
}

#[test]
fn free_scattering_state_is_the_data() {
    let g = Grid::cubic(2, 32, 32.0).unwrap();
    let cfg = ModelConfig::nls(2, 0.0, 0.0, 2.0, 4.0);
    let model = Model::new(&cfg, &g).unwrap();
    let u0 = gaussian(&g, 0.1, 2.0, &[]);
    let params = ScatterParams { fit_times: geometric_times(1.0, 4.0, 8), t_max: 16.0, ..ScatterParams::default() };
    let rep = exp_scattering(&model, &u0, &params).unwrap();
    assert!(rep.u_plus_shift < 1e-12, "{}", rep.u_plus_shift);
    assert!(rep.diff_norms.iter().all(|&d| d < 1e-12));
}

#[test]
fn unit_dilation_has_no_mismatch() {
    let g = Grid::cubic(2, 64, 20.0).unwrap();
    let q = DispersionSymbol::laplacian();
    let v0 = power_profile(&g, 1.0, OriginRule::HalfDiagonal);
    let a = propagate(&v0, &q, 0.7).unwrap();
    let m = scaling_mismatch(&a, &a, 1, 1.0).unwrap();
    assert_eq!(m.relative, 0.0);
    assert!(scaling_mismatch(&a, &a, 0, 1.0).is_err());
}

#[test]
fn stability_of_identical_and_swapped_data() {
    let g = Grid::cubic(2, 32, 32.0).unwrap();
    let cfg = ModelConfig::nls(2, 1.0, 1.0, 2.0, 4.0);
    let model = Model::new(&cfg, &g).unwrap();
    let u0 = gaussian(&g, 0.1, 2.0, &[]);
    let v0 = &u0 + &gaussian(&g, 0.02, 1.0, &[1.0, 0.0]);
    let mut params = StabilityParams::new(0.25);
    params.fit_times = geometric_times(1.0, 4.0, 8);
    let same = exp_stability(&model, &u0, &u0, &params).unwrap();
    assert!(same.identical());
    let ab = exp_stability(&model, &u0, &v0, &params).unwrap();
    let ba = exp_stability(&model, &v0, &u0, &params).unwrap();
    assert_eq!(ab.nonlinear_diff, ba.nonlinear_diff);
}

#[test]
fn leibniz_ratio_of_pure_mode_and_scaling() {
    let g = Grid::cubic(2, 32, 2.0 * std::f64::consts::PI).unwrap();
    let mode = Field::plane_wave(&g, &[1, 2]);
    let r = leibniz_ratios(&mode, 0.25, 2.0, 4.0).unwrap().unwrap();
    assert!(r.chain.is_finite() && r.chain > 0.0);
    let r2 = leibniz_ratios(&mode.scale(2.0), 0.25, 2.0, 4.0).unwrap().unwrap();
    assert!((r2.chain / r.chain - 1.0).abs() < 1e-12);
    assert!(leibniz_ratios(&Field::zeros(&g), 0.25, 2.0, 4.0).unwrap().is_none());
    let small = LeibnizParams { family_size: 10, ..LeibnizParams::default() };
    assert!(exp_leibniz(&small).is_err());
}

const GAUSSIAN_RUN: &str = r#"
seed = 7

[model]
n = 1
alpha = 2.0
gamma = 3.0
a = 1.0

[grid]
sizes = [256]
extents = [40.0]

[data]
kind = "gaussian"
amplitude = 0.05
sigma = 0.7071067811865476

[evolve]
t_final = 1.0
dt = 0.01
snapshot_count = 5

[picard]
t_final = 1.0
nt = 33

[norms]
p = [1.5, 4.0]
s = 0.25

[experiment]
kind = "dispersive"
"#;

#[test]
fn config_runs_every_mode() {
    let c = ExperimentConfig::parse(GAUSSIAN_RUN).unwrap();
    c.validate().unwrap();
    let ev = run_evolve(&c).unwrap();
    assert_eq!(ev.rows.len(), 5);
    let pic = run_picard(&c).unwrap();
    assert!(pic.all_passed());
    let norms = run_norms(&c).unwrap();
    assert_eq!(norms.rows.len(), 2);
    let exp = run_experiment(&c).unwrap();
    assert_eq!(exp.columns, vec!["t", "norm", "fitted_slope"]);
    // the 1D cubic model is outside the admissible range but still reported
    let cm = run_check_model(&c).unwrap();
    assert!(cm.summary.iter().any(|(k, v)| k == "admissible" && v == "false"));
}

#[test]
fn config_errors_are_config_errors() {
    let unknown = GAUSSIAN_RUN.replace("seed = 7", "seed = 7\ncolour = 3");
    assert!(ExperimentConfig::parse(&unknown).unwrap_err().is_config());
    let wrong_dim = GAUSSIAN_RUN.replace("sizes = [256]", "sizes = [256, 256]").replace("extents = [40.0]", "extents = [40.0, 40.0]");
    assert!(ExperimentConfig::parse(&wrong_dim).unwrap().validate().unwrap_err().is_config());
    let bad_symbol = GAUSSIAN_RUN.replace("a = 1.0", "a = 1.0\n[model.symbol]\nkind = \"anisotropic2\"\nm1 = 1.0");
    assert!(ExperimentConfig::parse(&bad_symbol).unwrap().validate().unwrap_err().is_config());
    assert!(ExperimentConfig::load(std::path::Path::new("/nonexistent/run.toml")).unwrap_err().is_config());
}

#[test]
fn random_data_follows_the_run_seed() {
    let text = GAUSSIAN_RUN.replace(
        "kind = \"gaussian\"\namplitude = 0.05\nsigma = 0.7071067811865476",
        "kind = \"random\"\namplitude = 1.0\nmodes = 4",
    );
    let a = ExperimentConfig::parse(&text).unwrap();
    let mut b = a.clone();
    b.seed = 8;
    let g = a.grid().unwrap();
    let (fa, fb) = (a.data(&g).unwrap(), b.data(&g).unwrap());
    assert!((&fa - &fb).max_abs() > 1e-3);
    assert_eq!(fa, a.data(&g).unwrap());
    let r1 = run_norms(&a).unwrap();
    let r2 = run_norms(&a).unwrap();
    assert_eq!(r1.rows, r2.rows);
}
