use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use nlwave::config::{RunConfig, SCHEMA_VERSION};
use nlwave::diagnostics::{run_suite, SuiteResult, SUITES};
use nlwave::dynamics::{DynamicsError, EnergyReading, MonitorState, Sample};
use nlwave::kernels::KernelMeasure;
use nlwave::limits::{assemble_report, ConvergenceReport, LimitError, LimitType};
use nlwave::picard::{picard_solve, PicardError, PicardSummary};

use crate::input::{load, parse_eps_list};
use crate::Global;

const ABORT: u8 = 2;

fn is_monitor_abort(err: &DynamicsError) -> bool {
    matches!(
        err,
        DynamicsError::HyperbolicityLost { .. }
            | DynamicsError::BoundaryContamination { .. }
            | DynamicsError::SpectralTailExceeded { .. }
            | DynamicsError::NonFiniteValue { .. }
    )
}

fn version() -> String {
    format!("nlwave {}", env!("CARGO_PKG_VERSION"))
}

fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn init_threads(global: &Global) -> Result<()> {
    if let Some(n) = global.threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn snapshot_csv(sample: &Sample) -> String {
    let s = &sample.state;
    let grid = s.u.grid();
    let mut out = String::from("x,u,v\n");
    for (j, (u, v)) in s.u.values().iter().zip(s.v.values()).enumerate() {
        let _ = writeln!(out, "{},{},{}", grid.x(j), u, v);
    }
    out
}

#[derive(Debug, Serialize)]
struct AbortInfo {
    reason: &'static str,
    message: String,
}

#[derive(Debug, Serialize)]
struct RunManifest {
    schema: u32,
    config_echo: RunConfig,
    version: String,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    abort: Option<AbortInfo>,
    monitors: Option<MonitorState>,
    energy: Vec<EnergyReading>,
    outputs: Vec<String>,
    wall_time: f64,
}

pub fn simulate(global: &Global) -> Result<ExitCode> {
    let cfg = load(global)?;
    let sim = cfg.validate()?;
    let init = cfg.initial_state()?;
    prepare_out(&global.out)?;

    let start = Instant::now();
    let mut outputs = Vec::new();
    let mut energy = Vec::new();
    let mut monitors = None;
    let mut io_error = None;
    let result = sim.integrate_observed(&init, cfg.sample_every, &mut |sample| {
        let name = format!("snapshot_{:05}.csv", outputs.len());
        if io_error.is_none() {
            if let Err(e) = fs::write(global.out.join(&name), snapshot_csv(sample)) {
                io_error = Some(e);
            }
        }
        outputs.push(name);
        energy.push(sample.energy);
        monitors = Some(sample.monitors);
    });
    if let Some(e) = io_error {
        return Err(e).context("cannot write snapshot");
    }
    let (status, abort) = match &result {
        Ok(last) => {
            monitors = Some(*last);
            ("completed", None)
        }
        Err(e) if is_monitor_abort(e) => ("aborted", Some(AbortInfo { reason: e.reason(), message: e.to_string() })),
        Err(e) => bail!("{e}"),
    };
    outputs.push("manifest.json".into());
    let manifest = RunManifest {
        schema: SCHEMA_VERSION,
        config_echo: cfg,
        version: version(),
        status,
        abort,
        monitors,
        energy,
        outputs,
        wall_time: start.elapsed().as_secs_f64(),
    };
    write_json(&global.out.join("manifest.json"), &manifest)?;
    match &manifest.abort {
        Some(a) => {
            eprintln!("run aborted: {}", a.message);
            Ok(ExitCode::from(ABORT))
        }
        None => {
            println!("{} snapshots written to {}", manifest.outputs.len() - 1, global.out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

#[derive(Debug, Serialize)]
struct StudyOutput<'a> {
    schema: u32,
    version: String,
    envelope_ok: bool,
    #[serde(flatten)]
    report: &'a ConvergenceReport,
}

pub fn study(global: &Global, kind: u8, eps: &str) -> Result<ExitCode> {
    init_threads(global)?;
    let cfg = load(global)?;
    cfg.validate()?;
    let init = cfg.initial_state()?;
    let eps_list = parse_eps_list(eps)?;
    let limit = if kind == 1 { LimitType::default_type1() } else { LimitType::default_type2() };
    let report = match assemble_report(&cfg.sim, &limit, &eps_list, &init, cfg.sample_every) {
        Ok(r) => r,
        Err(LimitError::Dynamics(e)) if is_monitor_abort(&e) => {
            eprintln!("run aborted: {e}");
            return Ok(ExitCode::from(ABORT));
        }
        Err(e) => bail!("{e}"),
    };
    let violation = report.envelope_violation();
    prepare_out(&global.out)?;
    write_json(
        &global.out.join("study_report.json"),
        &StudyOutput { schema: SCHEMA_VERSION, version: version(), envelope_ok: violation.is_none(), report: &report },
    )?;
    let csv = global.out.join("study_errors.csv");
    fs::write(&csv, report.to_csv()).with_context(|| format!("cannot write {}", csv.display()))?;
    println!("{}: fitted_order {} fitted_C {}", report.limit, report.fitted_order, report.fitted_c);
    match violation {
        Some(e) => {
            eprintln!("{e}");
            Ok(ExitCode::from(ABORT))
        }
        None => Ok(ExitCode::SUCCESS),
    }
}

#[derive(Debug, Serialize)]
struct PicardOutput {
    schema: u32,
    #[serde(flatten)]
    summary: PicardSummary,
}

pub fn picard(global: &Global, iters: usize, tol: f64) -> Result<ExitCode> {
    let cfg = load(global)?;
    let sim = cfg.validate()?;
    let init = cfg.initial_state()?;
    let run = match picard_solve(&sim, &init, iters, tol) {
        Ok(run) => run,
        Err(PicardError::Dynamics(e)) if is_monitor_abort(&e) => {
            eprintln!("run aborted: {e}");
            return Ok(ExitCode::from(ABORT));
        }
        Err(e @ PicardError::NoContraction { .. }) => {
            eprintln!("{e}");
            return Ok(ExitCode::from(ABORT));
        }
        Err(e) => bail!("{e}"),
    };
    let out = PicardOutput { schema: SCHEMA_VERSION, summary: run.summary() };
    prepare_out(&global.out)?;
    write_json(&global.out.join("picard.json"), &out)?;
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(if run.converged { ExitCode::SUCCESS } else { ExitCode::from(ABORT) })
}

/// Fixed-point text with trailing zeros removed.
fn short(x: f64) -> String {
    let s = format!("{x:.10}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

pub fn kernels(global: &Global, example: bool, rows: usize) -> Result<ExitCode> {
    let cfg = load(global)?;
    let kernel = if example { KernelMeasure::example_measure() } else { cfg.sim.kernel.clone() };
    let bounds = cfg.sim.clone_with_kernel(kernel.clone()).kernel_bounds()?;
    if rows < 2 {
        bail!("--rows must be at least 2");
    }
    let mut out = String::new();
    let _ = writeln!(out, "mass: {}", short(kernel.total_mass()));
    let _ = writeln!(out, "second_moment: {}", short(kernel.second_moment()));
    let _ = writeln!(out, "c1: {}", short(bounds.c1));
    let _ = writeln!(out, "c2: {}", short(bounds.c2));
    let _ = writeln!(out, "xi_max: {}", short(bounds.xi_max));
    out.push_str("\nxi,mu_hat,omega\n");
    for i in 0..rows {
        let xi = bounds.xi_max * i as f64 / (rows - 1) as f64;
        let omega = kernel.dispersion(xi)?.sqrt();
        let _ = writeln!(out, "{},{},{}", xi, kernel.symbol(xi), omega);
    }
    print!("{out}");
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Serialize)]
struct DiagnosticsOutput {
    schema: u32,
    seed: u64,
    all_passed: bool,
    suites: Vec<SuiteResult>,
}

pub fn diagnostics(global: &Global, requested: &[String]) -> Result<ExitCode> {
    let cfg = load(global)?;
    let names: Vec<&str> = if requested.is_empty() {
        SUITES.to_vec()
    } else {
        requested.iter().map(String::as_str).collect()
    };
    if let Some(bad) = names.iter().find(|n| !SUITES.contains(n)) {
        bail!("unknown suite {bad:?}; expected one of {}", SUITES.join(", "));
    }
    let suites = names.iter().map(|n| run_suite(n, cfg.seed)).collect::<Result<Vec<_>, _>>()?;
    let all_passed = suites.iter().all(|s| s.passed);
    for s in &suites {
        println!("{} {}", if s.passed { "PASS" } else { "FAIL" }, s.name);
    }
    prepare_out(&global.out)?;
    write_json(&global.out.join("diagnostics.json"), &DiagnosticsOutput { schema: SCHEMA_VERSION, seed: cfg.seed, all_passed, suites })?;
    Ok(if all_passed { ExitCode::SUCCESS } else { ExitCode::from(ABORT) })
}
