use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use yukawa_core::bounds::{verify_inequalities, BoundReport};
use yukawa_core::hamiltonian::TermStatistics;
use yukawa_core::solver::{converge_scan, lowest, ConvergenceReport, Method, SolverSettings};
use yukawa_core::{Model, Operator, Params};

use crate::config::{RunConfig, SCHEMA_VERSION};
use crate::CliError;

pub const OUT_DIR_VAR: &str = "YUKAWA_OUT_DIR";

pub struct Context {
    pub config: RunConfig,
    pub out: Option<PathBuf>,
    pub timings: bool,
    pub command: &'static str,
}

impl Context {
    fn output_path(&self, extension: &str) -> PathBuf {
        if let Some(p) = &self.out {
            return p.clone();
        }
        let dir = std::env::var_os(OUT_DIR_VAR)
            .map(PathBuf::from)
            .or_else(|| self.config.output.directory.clone())
            .unwrap_or_else(|| PathBuf::from("."));
        dir.join(format!("{}.{extension}", self.command.replace('-', "_")))
    }
}

struct Clock {
    start: Instant,
    marks: Vec<(&'static str, f64)>,
}

impl Clock {
    fn new() -> Self {
        Self {
            start: Instant::now(),
            marks: Vec::new(),
        }
    }

    fn mark(&mut self, name: &'static str) {
        self.marks.push((name, self.start.elapsed().as_secs_f64()));
    }

    fn report(&self, enabled: bool) -> Option<serde_json::Map<String, serde_json::Value>> {
        enabled.then(|| {
            let mut prev = 0.0;
            let mut map = serde_json::Map::new();
            for &(name, t) in &self.marks {
                map.insert(format!("{name}_seconds"), (t - prev).into());
                prev = t;
            }
            map.insert("total_seconds".into(), self.start.elapsed().as_secs_f64().into());
            map
        })
    }
}

fn create_parent(path: &Path) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    Ok(())
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    create_parent(path)?;
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct SpectrumRecord<'a> {
    schema_version: u32,
    command: &'static str,
    config: &'a RunConfig,
    params: &'a Params,
    dimension: usize,
    term_statistics: TermStatistics<f64>,
    eigenvalues: &'a [f64],
    #[serde(rename = "E_0")]
    ground_energy: f64,
    gap: Option<f64>,
    multiplicity: usize,
    residuals: &'a [f64],
    method: Method,
    iterations: usize,
    timings: Option<serde_json::Map<String, serde_json::Value>>,
}

pub fn spectrum(ctx: &Context) -> Result<(), CliError> {
    let mut clock = Clock::new();
    let model = Model::build(&ctx.config.model)?;
    let h = model.hamiltonian()?;
    clock.mark("build");
    let r = lowest(&h, &ctx.config.solver)?;
    clock.mark("solve");
    let record = SpectrumRecord {
        schema_version: SCHEMA_VERSION,
        command: ctx.command,
        config: &ctx.config,
        params: &ctx.config.model,
        dimension: h.dim(),
        term_statistics: model.term_statistics(),
        eigenvalues: &r.eigenvalues,
        ground_energy: r.ground_energy,
        gap: r.gap,
        multiplicity: r.multiplicity,
        residuals: &r.residuals,
        method: r.method,
        iterations: r.iterations,
        timings: clock.report(ctx.timings),
    };
    write_json(&ctx.output_path("json"), &record)
}

/// `‖H′‖`: dense singular values up to the dense cap, the two extreme
/// eigenvalues from Lanczos beyond it.
fn interaction_norm(h: &Operator, settings: &SolverSettings<f64>) -> Result<(f64, &'static str), CliError> {
    if h.dim() <= settings.dense_cap {
        return Ok((h.spectral_norm(settings.dense_cap)?, "dense"));
    }
    let s = SolverSettings {
        k: 1,
        method: Method::Lanczos,
        ..settings.clone()
    };
    let low = lowest(h, &s)?.ground_energy;
    let high = -lowest(&h.scale(yukawa_core::Complex64::new(-1.0, 0.0)), &s)?.ground_energy;
    Ok((low.abs().max(high.abs()), "lanczos"))
}

#[derive(Serialize)]
struct PerturbationRow {
    kappa: f64,
    shift: f64,
    bound: f64,
    holds: bool,
}

#[derive(Serialize)]
struct ScanSidecar<'a> {
    schema_version: u32,
    command: &'static str,
    config: &'a RunConfig,
    table: String,
    dimension: usize,
    rows: usize,
    complete: bool,
    error: Option<String>,
    all_gaps_positive: bool,
    ground_energy_at_zero: f64,
    interaction_norm: f64,
    interaction_norm_method: &'static str,
    perturbation_bound_holds: bool,
    perturbation: Vec<PerturbationRow>,
    timings: Option<serde_json::Map<String, serde_json::Value>>,
}

pub fn scan_kappa(ctx: &Context) -> Result<(), CliError> {
    let grid = ctx.config.scan.grid()?;
    let settings = &ctx.config.solver;
    let mut clock = Clock::new();
    let model = Model::build(&ctx.config.model)?;
    clock.mark("build");
    let e_zero = lowest(&model.total(0.0)?, settings)?.ground_energy;
    let (norm, norm_method) = interaction_norm(model.interaction(), settings)?;
    clock.mark("norm");

    let csv_path = ctx.output_path("csv");
    let mut sidecar_path = csv_path.with_extension("json");
    if sidecar_path == csv_path {
        sidecar_path = csv_path.with_extension("sidecar.json");
    }
    create_parent(&csv_path)?;
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", csv_path.display()));
    let mut table = csv::Writer::from_path(&csv_path).map_err(io)?;
    table.write_record(["kappa", "E0", "gap", "residual"]).map_err(io)?;
    table.flush()?;

    let slack = 10.0 * settings.tol + 1e-12;
    let mut sidecar = ScanSidecar {
        schema_version: SCHEMA_VERSION,
        command: ctx.command,
        config: &ctx.config,
        table: csv_path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        dimension: model.basis().dim(),
        rows: 0,
        complete: false,
        error: None,
        all_gaps_positive: true,
        ground_energy_at_zero: e_zero,
        interaction_norm: norm,
        interaction_norm_method: norm_method,
        perturbation_bound_holds: true,
        perturbation: Vec::new(),
        timings: None,
    };
    let mut failure = None;
    for &kappa in &grid {
        let r = match model.total(kappa).and_then(|h| lowest(&h, settings)) {
            Ok(r) => r,
            Err(e) => {
                failure = Some(e);
                break;
            }
        };
        let gap = r.gap.map(|g| g.to_string()).unwrap_or_default();
        table
            .write_record([
                kappa.to_string(),
                r.ground_energy.to_string(),
                gap,
                r.max_residual().to_string(),
            ])
            .map_err(io)?;
        table.flush()?;
        sidecar.rows += 1;
        sidecar.all_gaps_positive &= r.gap.is_some_and(|g| g > 0.0);
        let shift = (r.ground_energy - e_zero).abs();
        let bound = kappa.abs() * norm;
        let holds = shift <= bound + slack;
        sidecar.perturbation_bound_holds &= holds;
        sidecar.perturbation.push(PerturbationRow {
            kappa,
            shift,
            bound,
            holds,
        });
    }
    clock.mark("scan");
    sidecar.complete = failure.is_none();
    sidecar.error = failure.as_ref().map(|e| e.to_string());
    sidecar.timings = clock.report(ctx.timings);
    write_json(&sidecar_path, &sidecar)?;
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct ConvergeRecord<'a> {
    schema_version: u32,
    command: &'static str,
    config: &'a RunConfig,
    complete: bool,
    error: Option<String>,
    report: &'a ConvergenceReport<f64>,
    timings: Option<serde_json::Map<String, serde_json::Value>>,
}

pub fn converge(ctx: &Context) -> Result<(), CliError> {
    ctx.config.converge.refinement.validate()?;
    let mut clock = Clock::new();
    let outcome = converge_scan(&ctx.config.model, &ctx.config.converge.refinement, &ctx.config.solver);
    clock.mark("scan");
    let (report, error) = match outcome {
        Ok(r) => (r, None),
        Err(e) => (e.partial, Some(e.error)),
    };
    let record = ConvergeRecord {
        schema_version: SCHEMA_VERSION,
        command: ctx.command,
        config: &ctx.config,
        complete: error.is_none(),
        error: error.as_ref().map(|e| e.to_string()),
        report: &report,
        timings: clock.report(ctx.timings),
    };
    write_json(&ctx.output_path("json"), &record)?;
    match error {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct VerifyRecord<'a> {
    schema_version: u32,
    command: &'static str,
    config: &'a RunConfig,
    dimension: usize,
    report: &'a BoundReport<f64>,
    timings: Option<serde_json::Map<String, serde_json::Value>>,
}

pub fn verify(ctx: &Context) -> Result<(), CliError> {
    let settings = ctx.config.verify.settings();
    let mut clock = Clock::new();
    let model = Model::build(&ctx.config.model)?;
    clock.mark("build");
    let report = verify_inequalities(&model, &settings)?;
    clock.mark("verify");
    let record = VerifyRecord {
        schema_version: SCHEMA_VERSION,
        command: ctx.command,
        config: &ctx.config,
        dimension: model.basis().dim(),
        report: &report,
        timings: clock.report(ctx.timings),
    };
    write_json(&ctx.output_path("json"), &record)?;
    if report.all_pass {
        Ok(())
    } else {
        Err(CliError::VerifyFailed)
    }
}
