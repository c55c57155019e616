//! Executes configured experiments and writes their artifacts.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde_json::json;

use super::composed::composed_operator_check;
use super::config::{ExperimentConfig, ExperimentKind, Route};
use super::constants::{constants, ConstantsReport};
use super::fit::{weyl_fit, window_from_fractions, WeylFitResult};
use super::report::{write_json, write_plot_csv, write_spectrum_csv, CheckResult, RunSummary};
use super::{ExperimentError, Result};
use crate::disc::{DiscConfig, DiscModel};
use crate::femlab::{self, BoundaryCondition, Geometry};
use crate::halfline::{self, HalflineGrid, PlusMask};
use crate::linalg::SingularSpectrum;

/// Environment variable with the batch worker count.
pub const THREADS_ENV: &str = "ZAREMBA_THREADS";

const TOL_CONSTANTS: f64 = 1e-12;
const TOL_WEYL: f64 = 0.10;
const TOL_FACTORIZATION: f64 = 1e-6;
const TOL_HANKEL: f64 = 1e-3;
const TOL_REMAINDER: f64 = 0.5;
const TOL_HALFDISC_EXACT: f64 = 0.01;
const TOL_FEM_VS_MODAL: f64 = 0.05;
const TOL_ROUTES: f64 = 0.02;

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    out: &'a Path,
    spectra: Vec<PathBuf>,
    fits: Vec<WeylFitResult>,
    checks: BTreeMap<String, CheckResult>,
}

impl Ctx<'_> {
    fn check(&mut self, name: &str, value: f64, tolerance: f64, default_enabled: bool) {
        let enabled = self.cfg.check_enabled(name, default_enabled);
        self.checks.insert(name.to_string(), CheckResult::at_most(value, tolerance, enabled));
    }

    /// Writes `<experiment>[_<stem>]_spectrum.csv` and the matching `_plot.csv`.
    fn emit(&mut self, stem: &str, values: &[f64], p: f64) -> Result<()> {
        let kind = self.cfg.experiment.name();
        let name = if stem.is_empty() { kind.to_string() } else { format!("{kind}_{stem}") };
        let spec = self.out.join(format!("{name}_spectrum.csv"));
        write_spectrum_csv(&spec, values)?;
        write_plot_csv(&self.out.join(format!("{name}_plot.csv")), values, p)?;
        self.spectra.push(spec);
        Ok(())
    }
}

/// Constants of the configured planar geometry (`n = 2`).
pub fn geometry_constants(cfg: &ExperimentConfig) -> Result<ConstantsReport> {
    match cfg.geometry() {
        Geometry::Disc => constants(2, cfg.theta_plus(), 2.0 * PI, PI),
        Geometry::HalfDisc => constants(2, 2.0, PI + 2.0, PI / 2.0),
    }
}

fn disc_config(cfg: &ExperimentConfig) -> DiscConfig {
    DiscConfig {
        alpha: cfg.alpha(),
        b: cfg.b(),
        theta_plus: cfg.theta_plus(),
        grid_n: cfg.grid_n(),
        shift_k: cfg.shift_k(),
    }
}

fn max_relative(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs() / y.abs()).fold(0.0, f64::max)
}

fn run_constants(ctx: &mut Ctx, c: &ConstantsReport) -> Result<serde_json::Value> {
    let s2pi = 2f64.sqrt() * PI;
    ctx.check("c_n", (c.c_n - 1.0 / s2pi).abs(), TOL_CONSTANTS, true);
    ctx.check("C0_plus", (c.c0_plus - c.arc_length / s2pi).abs(), TOL_CONSTANTS, true);
    ctx.check("C0", (c.c0 - c.boundary_length / s2pi).abs(), TOL_CONSTANTS, true);
    ctx.check("C_A", (c.c_a - c.domain_measure / (4.0 * PI)).abs(), TOL_CONSTANTS, true);
    Ok(json!({ "predicted_mixed": c.predicted_mixed(), "predicted_full": c.predicted_full() }))
}

fn run_halfline(ctx: &mut Ctx) -> Result<serde_json::Value> {
    let cfg = ctx.cfg;
    let alpha = cfg.alpha();
    let grid = HalflineGrid::new(cfg.extent(), cfg.grid_n()).map_err(ExperimentError::config)?;
    let mask = PlusMask::for_grid(&grid);
    let dec = halfline::theorem57_check(alpha, &grid, &mask).map_err(ExperimentError::compute)?;
    let u = halfline::standard_bump(&grid, &mask);
    let fact = halfline::factorization_residuals(alpha, &grid, &mask, &u).map_err(ExperimentError::compute)?;
    let leak = halfline::support_leakage(alpha, &grid).map_err(ExperimentError::compute)?;
    let window = halfline::raised_cosine_window(&grid);
    let decay = halfline::gplus_decay(alpha, &grid, &mask, window).map_err(ExperimentError::compute)?;
    ctx.check("decomposition_r1", dec.r1, TOL_FACTORIZATION, true);
    ctx.check("decomposition_r2", dec.r2, TOL_HANKEL, true);
    ctx.check("hankel_gap", dec.hankel_gap, TOL_HANKEL, true);
    ctx.check("factorization_left", fact.left, TOL_FACTORIZATION, true);
    // Off by default: band-limited L₀ applied to the t^{1/2} cut singularity of L₀⁻¹u stalls near 5e-4.
    ctx.check("factorization_right", fact.right, TOL_FACTORIZATION, false);
    ctx.emit("gplus", decay.spectrum.values(), 0.5)?;
    Ok(json!({ "decomposition": dec, "factorization": fact, "support_leakage": leak, "gplus_trend": decay.trend }))
}

fn route_spectrum(model: &DiscModel, route: Route) -> Result<SingularSpectrum> {
    let r = match route {
        Route::A => model.route_a(),
        Route::B => model.route_b(),
        Route::Neumann => model.route_neumann(),
        Route::ClosedForm => model.full_boundary_spectrum(),
    };
    r.map_err(ExperimentError::compute)
}

fn run_disc(ctx: &mut Ctx, c: &ConstantsReport) -> Result<serde_json::Value> {
    let cfg = ctx.cfg;
    let model = DiscModel::new(disc_config(cfg)).map_err(ExperimentError::config)?;
    let p = cfg.fit_exponent.unwrap_or(c.exponent());
    let mut details = serde_json::Map::new();
    for route in cfg.routes() {
        let spec = route_spectrum(&model, route)?;
        let predicted = if route == Route::ClosedForm { c.predicted_full() } else { c.predicted_mixed() };
        let window = window_from_fractions(cfg.fit_window(), cfg.grid_n(), spec.len())?;
        let fit = weyl_fit(&spec, p, window, cfg.fit_options())?.with_prediction(predicted);
        ctx.check(&format!("weyl_{}", route.name()), fit.relative_error.unwrap_or(f64::INFINITY), TOL_WEYL, true);
        ctx.emit(route.name(), spec.values(), p)?;
        ctx.fits.push(fit);
    }
    if cfg.check_enabled("remainder_trend", false) {
        let r = model.theorem59_remainder().map_err(ExperimentError::compute)?;
        ctx.check("remainder_trend", r.trend, TOL_REMAINDER, true);
        details.insert("remainder_trend".into(), json!(r.trend));
    }
    details.insert("p0".into(), json!(model.p.value(0)));
    Ok(serde_json::Value::Object(details))
}

fn run_fem(ctx: &mut Ctx) -> Result<serde_json::Value> {
    let cfg = ctx.cfg;
    let alpha = cfg.alpha();
    let mesh = femlab::build_mesh(cfg.geometry(), cfg.n_r(), cfg.n_theta()).map_err(ExperimentError::config)?;
    let mixed_bc = BoundaryCondition::Mixed { theta_plus: cfg.theta_plus(), b: cfg.b() };
    let mixed = femlab::assemble(&mesh, alpha, mixed_bc).map_err(ExperimentError::compute)?;
    let dir = femlab::assemble(&mesh, alpha, BoundaryCondition::Dirichlet).map_err(ExperimentError::compute)?;
    let mu_mixed = femlab::realization_spectrum(&mixed, 4).map_err(ExperimentError::compute)?;
    let mu_dir = femlab::realization_spectrum(&dir, 4).map_err(ExperimentError::compute)?;
    ctx.check("form_monotonicity", (mu_mixed[0] - mu_dir[0]).max(0.0), 0.0, true);
    let mut details = json!({
        "nodes": mesh.node_count(),
        "mixed_eigenvalues": mu_mixed,
        "dirichlet_eigenvalues": mu_dir,
    });
    match cfg.geometry() {
        Geometry::HalfDisc => {
            let exact: Vec<f64> = femlab::halfdisc_mixed_exact(alpha, alpha * alpha + 40.0 * 40.0)
                .map_err(ExperimentError::compute)?
                .into_iter()
                .take(4)
                .collect();
            ctx.check("halfdisc_exact", max_relative(&mu_mixed, &exact), TOL_HALFDISC_EXACT, true);
            details["exact_eigenvalues"] = json!(exact);
        }
        Geometry::Disc if mesh.node_count() <= femlab::DENSE_NODE_LIMIT => {
            let count = mixed.partition().plus.len().clamp(1, 200);
            let spec = femlab::resolvent_difference_spectrum(&mesh, alpha, cfg.theta_plus(), cfg.b(), count)
                .map_err(ExperimentError::compute)?;
            ctx.emit("resolvent_difference", spec.values(), 2.0)?;
        }
        Geometry::Disc => {}
    }
    Ok(details)
}

fn run_compare(ctx: &mut Ctx) -> Result<serde_json::Value> {
    let cfg = ctx.cfg;
    let model = DiscModel::new(disc_config(cfg)).map_err(ExperimentError::config)?;
    let a = model.route_a().map_err(ExperimentError::compute)?;
    let neu = model.route_neumann().map_err(ExperimentError::compute)?;
    let mesh = femlab::build_mesh(Geometry::Disc, cfg.n_r(), cfg.n_theta()).map_err(ExperimentError::config)?;
    let fem = femlab::resolvent_difference_spectrum(&mesh, cfg.alpha(), cfg.theta_plus(), cfg.b(), 10)
        .map_err(ExperimentError::compute)?;
    let fem_gap = max_relative(&fem.values()[..5], &a.values()[..5]);
    let route_gap = max_relative(&neu.values()[..10], &a.values()[..10]);
    ctx.check("fem_vs_modal", fem_gap, TOL_FEM_VS_MODAL, true);
    ctx.check("dirichlet_vs_neumann", route_gap, TOL_ROUTES, true);
    ctx.emit("modal_a", a.values(), 2.0)?;
    ctx.emit("modal_neumann", neu.values(), 2.0)?;
    ctx.emit("fem", fem.values(), 2.0)?;
    Ok(json!({ "fem_top": fem.values(), "modal_top": &a.values()[..10], "neumann_top": &neu.values()[..10] }))
}

fn run_composed(ctx: &mut Ctx) -> Result<serde_json::Value> {
    let cfg = ctx.cfg;
    let factors = cfg.factors.clone().unwrap_or_default();
    let multipliers = cfg.multipliers.iter().flatten().map(|m| m.build()).collect::<Result<Vec<_>>>()?;
    let n = cfg.grid_n();
    let window = window_from_fractions(cfg.fit_window(), n, n)?;
    let r = composed_operator_check(&factors, &multipliers, n, window, cfg.fit_options())?;
    ctx.check("composed", r.relative_gap, TOL_WEYL, true);
    ctx.emit("", &r.singular_values, r.total_order)?;
    ctx.fits.push(r.fit.clone());
    Ok(json!({ "predicted": r.predicted, "total_order": r.total_order }))
}

/// Runs `cfg`, writing artifacts and `summary.json` into `out`.
pub fn run_experiment(cfg: &ExperimentConfig, out: &Path) -> Result<RunSummary> {
    cfg.validate()?;
    let consts = geometry_constants(cfg)?;
    let mut ctx = Ctx { cfg, out, spectra: Vec::new(), fits: Vec::new(), checks: BTreeMap::new() };
    let details = match cfg.experiment {
        ExperimentKind::Constants => run_constants(&mut ctx, &consts)?,
        ExperimentKind::Halfline => run_halfline(&mut ctx)?,
        ExperimentKind::Disc => run_disc(&mut ctx, &consts)?,
        ExperimentKind::Fem => run_fem(&mut ctx)?,
        ExperimentKind::Compare => run_compare(&mut ctx)?,
        ExperimentKind::Composed => run_composed(&mut ctx)?,
    };
    let summary = RunSummary {
        config: cfg.clone(),
        spectra: ctx.spectra,
        fits: ctx.fits,
        constants: consts,
        checks: ctx.checks,
        details,
    };
    write_json(&out.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Output directory: explicit override, then the config's `out_dir`, then `out`.
pub fn resolve_out_dir(cfg: &ExperimentConfig, explicit: Option<&Path>) -> PathBuf {
    explicit.map(Path::to_path_buf).or_else(|| cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from("out"))
}

/// Process exit code for a run result.
pub fn exit_code(result: &Result<RunSummary>) -> i32 {
    match result {
        Ok(s) => s.exit_code(),
        Err(e) => e.exit_code(),
    }
}

/// Worker count from [`THREADS_ENV`]; absent or invalid means 1.
pub fn batch_threads() -> usize {
    std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0).unwrap_or(1)
}

/// Runs independent jobs on up to `threads` workers; results keep job order.
pub fn run_batch(jobs: &[(ExperimentConfig, PathBuf)], threads: usize) -> Vec<Result<RunSummary>> {
    let threads = threads.max(1).min(jobs.len().max(1));
    if threads == 1 {
        return jobs.iter().map(|(c, o)| run_experiment(c, o)).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots: Vec<std::sync::Mutex<Option<Result<RunSummary>>>> =
        jobs.iter().map(|_| std::sync::Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                let Some((c, o)) = jobs.get(i) else { break };
                let r = run_experiment(c, o);
                *slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().unwrap().expect("job ran")).collect()
}
