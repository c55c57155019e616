//! `zaremba`: runs spectral experiments from JSON configs or flags.
//!
//! Exit codes: 0 pass, 1 computation error, 2 acceptance-check failure,
//! 3 configuration or usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zaremba_core::experiments::report::{read_spectrum_csv, write_json};
use zaremba_core::experiments::runner::{batch_threads, exit_code, resolve_out_dir, run_batch, THREADS_ENV};
use zaremba_core::experiments::{
    run_experiment, weyl_fit_values, ExperimentConfig, ExperimentError, ExperimentKind, FitOptions, MultiplierSpec,
    Route, RunSummary, SymbolFactor,
};
use zaremba_core::femlab::{self, Geometry};

#[derive(Parser)]
#[command(name = "zaremba", version, about = "Resolvent-difference spectra of the Zaremba problem for -Δ + α²")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form Weyl constants of the configured geometry.
    Constants(RunArgs),
    /// Half-line Wiener-Hopf factorization and decomposition residuals.
    Halfline(RunArgs),
    /// Disc modal Krein spectra and Weyl fits.
    Disc(RunArgs),
    /// Finite-element realizations and resolvent differences.
    Fem(FemArgs),
    /// FEM oracle against the modal routes.
    Compare(RunArgs),
    /// Composed operator `b₁P₁…b_l P_l b_{l+1}` on the circle.
    Composed(ComposedArgs),
    /// Weyl fit of a spectrum CSV.
    WeylFit(WeylFitArgs),
    /// Runs several config files, optionally in parallel.
    Batch(BatchArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration file; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: config `out_dir`, else `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    theta_plus: Option<f64>,
    #[arg(long)]
    grid_n: Option<usize>,
    #[arg(long)]
    extent: Option<f64>,
    #[arg(long)]
    shift_k: Option<f64>,
    /// `disc` or `half-disc`.
    #[arg(long, value_parser = parse_geometry)]
    geometry: Option<Geometry>,
    #[arg(long)]
    n_r: Option<usize>,
    #[arg(long)]
    n_theta: Option<usize>,
    /// Fit window as fractions of `grid_n`: `lo,hi`.
    #[arg(long, value_parser = parse_pair)]
    fit_window: Option<[f64; 2]>,
    #[arg(long)]
    fit_exponent: Option<f64>,
    #[arg(long)]
    extrapolation_order: Option<usize>,
    #[arg(long)]
    correction_exponent: Option<f64>,
    /// Disc route (`a`, `b`, `neumann`, `closed_form`); repeatable.
    #[arg(long = "route", value_parser = parse_route)]
    routes: Vec<Route>,
    /// Enable or disable a check: `name=true|false`; repeatable.
    #[arg(long = "check", value_parser = parse_check)]
    checks: Vec<(String, bool)>,
}

#[derive(Args)]
struct FemArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Also write the mesh as `mesh.nodes` / `mesh.tri` into the output directory.
    #[arg(long)]
    export_mesh: bool,
}

#[derive(Args)]
struct ComposedArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Symbol factor `order[:coeff]` for `coeff·|m|^{-order}`; repeatable.
    #[arg(long = "factor", value_parser = parse_factor)]
    factors: Vec<SymbolFactor>,
    /// Multiplier `const:v`, `arc:start:length:v` or `pieces:b1/b2/..:v1/v2/..`; repeatable.
    #[arg(long = "multiplier", value_parser = parse_multiplier)]
    multipliers: Vec<MultiplierSpec>,
}

#[derive(Args)]
struct WeylFitArgs {
    /// Spectrum CSV with header `j,s_j`.
    #[arg(long)]
    input: PathBuf,
    /// Weight exponent `p` in `s_j j^p`.
    #[arg(long, default_value_t = 2.0)]
    exponent: f64,
    /// 1-based index window `lo,hi`.
    #[arg(long, value_parser = parse_window)]
    window: (usize, usize),
    #[arg(long, default_value_t = 1)]
    order: usize,
    #[arg(long, default_value_t = zaremba_core::experiments::fit::DEFAULT_CORRECTION)]
    correction_exponent: f64,
    /// Values at or below this are dropped from the fit.
    #[arg(long, default_value_t = 0.0)]
    floor: f64,
    /// Predicted limit; enables the relative-error check.
    #[arg(long)]
    predicted: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    tolerance: f64,
    /// Write the fit as JSON here as well as to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BatchArgs {
    /// Config files; each runs into `<out>/<file stem>`.
    #[arg(required = true)]
    configs: Vec<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker count (default: the ZAREMBA_THREADS environment variable, else 1).
    #[arg(long)]
    threads: Option<usize>,
}

fn parse_geometry(s: &str) -> Result<Geometry, String> {
    match s {
        "disc" => Ok(Geometry::Disc),
        "half-disc" => Ok(Geometry::HalfDisc),
        _ => Err(format!("unknown geometry `{s}` (disc, half-disc)")),
    }
}

fn parse_route(s: &str) -> Result<Route, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| format!("unknown route `{s}`"))
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.trim().parse().map_err(|_| format!("`{s}` is not a number"))
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let (a, b) = s.split_once(',').ok_or("expected `lo,hi`")?;
    Ok([parse_f64(a)?, parse_f64(b)?])
}

fn parse_window(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected `lo,hi`")?;
    let p = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("`{t}` is not an index"));
    Ok((p(a)?, p(b)?))
}

fn parse_check(s: &str) -> Result<(String, bool), String> {
    let (name, v) = s.split_once('=').ok_or("expected `name=true|false`")?;
    let v = v.parse::<bool>().map_err(|_| format!("`{v}` is not true/false"))?;
    Ok((name.to_string(), v))
}

fn parse_factor(s: &str) -> Result<SymbolFactor, String> {
    let (order, coeff) = match s.split_once(':') {
        Some((o, c)) => (parse_f64(o)?, parse_f64(c)?),
        None => (parse_f64(s)?, 1.0),
    };
    Ok(SymbolFactor { order, coeff })
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split('/').map(parse_f64).collect()
}

fn parse_multiplier(s: &str) -> Result<MultiplierSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["const", v] => Ok(MultiplierSpec::Constant { value: parse_f64(v)? }),
        ["arc", start, length, v] => {
            Ok(MultiplierSpec::Arc { start: parse_f64(start)?, length: parse_f64(length)?, value: parse_f64(v)? })
        }
        ["pieces", b, v] => Ok(MultiplierSpec::Pieces { breaks: parse_list(b)?, values: parse_list(v)? }),
        _ => Err(format!("bad multiplier `{s}`")),
    }
}

/// Loads `--config` (or starts empty), checks the experiment kind, applies
/// flag overrides and `extra`, then validates.
fn build_config(
    kind: ExperimentKind,
    a: &RunArgs,
    extra: impl FnOnce(&mut ExperimentConfig),
) -> Result<ExperimentConfig, ExperimentError> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ExperimentError::config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<ExperimentConfig>(&text).map_err(ExperimentError::config)?
        }
        None => ExperimentConfig::new(kind),
    };
    if cfg.experiment != kind {
        return Err(ExperimentError::config(format!(
            "config is for `{}`, subcommand is `{}`",
            cfg.experiment.name(),
            kind.name()
        )));
    }
    macro_rules! set {
        ($($f:ident),*) => { $( if a.$f.is_some() { cfg.$f = a.$f; } )* };
    }
    set!(alpha, b, theta_plus, grid_n, extent, shift_k, geometry, n_r, n_theta, fit_window, fit_exponent);
    set!(extrapolation_order, correction_exponent);
    if !a.routes.is_empty() {
        cfg.routes = Some(a.routes.clone());
    }
    for (name, on) in &a.checks {
        cfg.checks.insert(name.clone(), *on);
    }
    extra(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

fn report(result: &Result<RunSummary, ExperimentError>, out: &Path) {
    match result {
        Ok(s) => {
            for (name, c) in &s.checks {
                let state = match (c.enabled, c.pass) {
                    (false, _) => "off ",
                    (true, true) => "pass",
                    (true, false) => "FAIL",
                };
                println!("{state} {name}: {:.3e} (tol {:.1e})", c.value, c.tolerance);
            }
            for f in &s.fits {
                println!(
                    "fit p={} window {:?}: raw {:.6} extrapolated {:.6}",
                    f.exponent, f.window, f.raw, f.extrapolated
                );
            }
            println!("summary: {}", out.join("summary.json").display());
        }
        Err(e) => eprintln!("error: {e}"),
    }
}

fn run(kind: ExperimentKind, a: &RunArgs, extra: impl FnOnce(&mut ExperimentConfig)) -> i32 {
    let cfg = match build_config(kind, a, extra) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let out = resolve_out_dir(&cfg, a.out.as_deref());
    let result = run_experiment(&cfg, &out);
    report(&result, &out);
    exit_code(&result)
}

fn run_fem(a: &FemArgs) -> i32 {
    let code = run(ExperimentKind::Fem, &a.run, |_| {});
    if a.export_mesh && (code == 0 || code == 2) {
        let cfg = build_config(ExperimentKind::Fem, &a.run, |_| {}).expect("validated by the run");
        let out = resolve_out_dir(&cfg, a.run.out.as_deref());
        let written = femlab::build_mesh(cfg.geometry(), cfg.n_r(), cfg.n_theta())
            .map_err(|e| e.to_string())
            .and_then(|m| m.export(&out, "mesh").map_err(|e| e.to_string()));
        if let Err(e) = written {
            eprintln!("error: mesh export: {e}");
            return 1;
        }
        println!("mesh: {}", out.join("mesh.nodes").display());
    }
    code
}

/// Flag factors and multipliers replace the config's lists.
fn run_composed(a: &ComposedArgs) -> i32 {
    run(ExperimentKind::Composed, &a.run, |c| {
        if !a.factors.is_empty() {
            c.factors = Some(a.factors.clone());
        }
        if !a.multipliers.is_empty() {
            c.multipliers = Some(a.multipliers.clone());
        }
    })
}

fn run_weyl_fit(a: &WeylFitArgs) -> i32 {
    let values = match read_spectrum_csv(&a.input) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return 3;
        }
    };
    let opts = FitOptions { order: a.order, correction_exponent: a.correction_exponent };
    let fit = match weyl_fit_values(&values, a.floor, a.exponent, a.window, opts) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let fit = match a.predicted {
        Some(p) => fit.with_prediction(p),
        None => fit,
    };
    let text = serde_json::to_string_pretty(&fit).expect("fit serializes");
    println!("{text}");
    if let Some(out) = &a.out {
        if let Err(e) = write_json(out, &fit) {
            eprintln!("error: {e}");
            return 1;
        }
    }
    match fit.relative_error {
        Some(e) if e.is_nan() || e > a.tolerance => 2,
        _ => 0,
    }
}

fn run_batch_cmd(a: &BatchArgs) -> i32 {
    let mut jobs = Vec::new();
    for path in &a.configs {
        match ExperimentConfig::from_file(path) {
            Ok(cfg) => {
                let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "job".into());
                jobs.push((cfg, a.out.join(stem)));
            }
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return e.exit_code();
            }
        }
    }
    let threads = a.threads.unwrap_or_else(batch_threads);
    if threads > 1 {
        println!("running {} jobs on {threads} threads ({THREADS_ENV})", jobs.len());
    }
    let results = run_batch(&jobs, threads);
    let mut codes = Vec::new();
    for ((_, out), r) in jobs.iter().zip(&results) {
        println!("== {}", out.display());
        report(r, out);
        codes.push(exit_code(r));
    }
    // Config errors dominate, then computation errors, then check failures.
    [3, 1, 2].into_iter().find(|c| codes.contains(c)).unwrap_or(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 3 } else { 0 });
        }
    };
    let code = match &cli.command {
        Command::Constants(a) => run(ExperimentKind::Constants, a, |_| {}),
        Command::Halfline(a) => run(ExperimentKind::Halfline, a, |_| {}),
        Command::Disc(a) => run(ExperimentKind::Disc, a, |_| {}),
        Command::Fem(a) => run_fem(a),
        Command::Compare(a) => run(ExperimentKind::Compare, a, |_| {}),
        Command::Composed(a) => run_composed(a),
        Command::WeylFit(a) => run_weyl_fit(a),
        Command::Batch(a) => run_batch_cmd(a),
    };
    ExitCode::from(code as u8)
}
