//! `dispersolve` command-line front end.
//!
//! Every subcommand except `derive-params` reads a TOML run file and writes
//! CSV: `#`-prefixed header lines echoing the run file, then one row of
//! column names, then data rows.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dispersolve::experiments::config::{run_check_model, run_evolve, run_experiment, run_norms, run_picard};
use dispersolve::experiments::{ExperimentConfig, ExperimentOutput};
use dispersolve::params::derive_exponents;
use dispersolve::{DispersionSymbol, Error, ModelConfig, MultiplierSpec};

const SCHEMA: &str = "dispersolve-csv/1";

#[derive(Parser)]
#[command(name = "dispersolve", version, about = "Decay, scattering and stability experiments for dispersive equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the derived exponents and admissibility flags.
    DeriveParams {
        #[arg(long)]
        n: usize,
        /// Homogeneity degree of the dispersion symbol.
        #[arg(long, default_value_t = 2.0)]
        d: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        gamma: f64,
    },
    /// Exponents, flags and the smallness budget for a run file.
    CheckModel(RunArgs),
    /// Weak-Lp and Sobolev-Lorentz norms of the configured data.
    Norms(RunArgs),
    /// Split-step evolution of the configured data.
    Evolve(RunArgs),
    /// Picard iteration of the Duhamel map.
    Picard(RunArgs),
    /// Run the experiment described in the `[experiment]` section.
    Experiment {
        kind: ExperimentKind,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML run file.
    #[arg(long, short)]
    config: PathBuf,
    /// CSV destination; defaults to the run file's `output` key, then stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentKind {
    Dispersive,
    Scatter,
    Selfsim,
    Stability,
    Leibniz,
}

impl ExperimentKind {
    fn name(self) -> &'static str {
        match self {
            ExperimentKind::Dispersive => "dispersive",
            ExperimentKind::Scatter => "scatter",
            ExperimentKind::Selfsim => "selfsim",
            ExperimentKind::Stability => "stability",
            ExperimentKind::Leibniz => "leibniz",
        }
    }
}

enum Failure {
    Run(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors and 0 for --help
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::DeriveParams { n, d, alpha, gamma } => derive_params(n, d, alpha, gamma),
        Command::CheckModel(run) => with_config(&run, "check-model", run_check_model),
        Command::Norms(run) => with_config(&run, "norms", run_norms),
        Command::Evolve(run) => with_config(&run, "evolve", run_evolve),
        Command::Picard(run) => with_config(&run, "picard", run_picard),
        Command::Experiment { kind, run } => with_config(&run, kind.name(), |cfg| {
            let found = cfg.experiment.as_ref().map(|e| e.name());
            if found != Some(kind.name()) {
                return Err(Error::Config(format!(
                    "run file describes experiment {:?}, not {}",
                    found.unwrap_or("none"),
                    kind.name()
                )));
            }
            run_experiment(cfg)
        }),
    }
}

fn derive_params(n: usize, d: f64, alpha: f64, gamma: f64) -> Result<(), Failure> {
    let cfg = ModelConfig::new(n, DispersionSymbol::laplacian().with_degree(d), MultiplierSpec::Identity, 1.0, 1.0, alpha, gamma);
    let dp = derive_exponents(&cfg)?;
    let values = [
        ("s", dp.s),
        ("beta", dp.beta),
        ("delta", dp.delta),
        ("kappa", dp.kappa),
        ("identity_beta_residual", dp.identity_beta_residual),
        ("identity_delta_residual", dp.identity_delta_residual),
    ];
    let mut out = io::stdout().lock();
    writeln!(out, "n = {n}, d = {d}, alpha = {alpha}, gamma = {gamma}")?;
    for (k, v) in &values {
        writeln!(out, "  {k:<24} {v:>12.6}")?;
    }
    for f in &dp.admissibility.flags {
        let state = match (f.applicable, f.holds) {
            (false, _) => "n/a",
            (true, true) => "holds",
            (true, false) => "violated",
        };
        writeln!(out, "  {:<24} {state:>12}  margin {:+.6}", f.name, f.margin)?;
    }
    writeln!(out)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["name", "value"])?;
    for (k, v) in &values {
        w.write_record([k.to_string(), fmt(*v)])?;
    }
    for f in &dp.admissibility.flags {
        if f.applicable {
            w.write_record([format!("flag_{}", f.name), if f.holds { "1".into() } else { "0".into() }])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn with_config(run: &RunArgs, what: &str, f: impl FnOnce(&ExperimentConfig) -> dispersolve::Result<ExperimentOutput>) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&run.config).map_err(|e| Error::Config(format!("{}: {e}", run.config.display())))?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    cfg.apply_env()?;
    cfg.validate()?;
    let result = f(&cfg)?;
    let dest = run.output.clone().or_else(|| cfg.output.clone());
    match dest {
        Some(path) => {
            let file = File::create(&path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            write_csv(&mut w, what, &run.config, &text, cfg.seed, &result)?;
            w.flush()?;
            for c in &result.checks {
                eprintln!("{} {}: {:e} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.target);
            }
        }
        None => write_csv(&mut io::stdout().lock(), what, &run.config, &text, cfg.seed, &result)?,
    }
    Ok(())
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_csv(out: &mut impl Write, what: &str, path: &Path, text: &str, seed: u64, r: &ExperimentOutput) -> Result<(), Failure> {
    writeln!(out, "# schema: {SCHEMA} command={what} columns={}", r.columns.join(","))?;
    writeln!(out, "# config: file {}", path.display())?;
    for line in text.lines() {
        writeln!(out, "# config: {line}")?;
    }
    writeln!(out, "# seed: {seed}")?;
    let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    writeln!(out, "# generated: unix {now}")?;
    for (k, v) in &r.summary {
        writeln!(out, "# result: {k} = {v}")?;
    }
    for c in &r.checks {
        writeln!(out, "# check: {} {} value {} target {}", c.name, if c.passed { "PASS" } else { "FAIL" }, fmt(c.value), c.target)?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&r.columns)?;
    for row in &r.rows {
        w.write_record(row.iter().map(|v| fmt(*v)))?;
    }
    w.flush()?;
    Ok(())
}
