//! Command-line surface: config loading, the solve/sweep/curve/validate
//! commands and deterministic CSV/JSON emission.
//!
//! The config file and all emitted artifacts use degrees; radians never
//! cross this boundary.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::analysis::{oracle_scan, sample_curve, sweep, SweepRecord};
use crate::model::{MaterialParams, ModelError, TensionInput, UnitGeometry, STANDARD_GRAVITY};
use crate::solver::{solve_unit, verify_state, BisectionConfig, SolverError};

/// Exit codes: 0 success, 1 solver failure, 2 input/config error, 3 internal.
pub const EXIT_OK: i32 = 0;
pub const EXIT_SOLVER: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config validation error: {0}")]
    Validation(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("solver failure: {0}")]
    Solver(#[from] SolverError),
    #[error("validation checks failed")]
    ChecksFailed,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Validation(_) | CliError::Input(_) => EXIT_INPUT,
            CliError::Solver(_) | CliError::ChecksFailed => EXIT_SOLVER,
            CliError::Io(_) => EXIT_INTERNAL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

// Raw (serde) layer: degrees and plain numbers, unknown keys rejected.

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    geometry: RawGeometry,
    material: RawMaterial,
    #[serde(default)]
    solver: RawSolver,
    #[serde(default)]
    output_format: OutputFormat,
    #[serde(default)]
    output_path: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    l: f64,
    r: f64,
    delta: Option<f64>,
    theta1_deg: f64,
    theta2_deg: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMaterial {
    m: Option<f64>,
    #[serde(default = "default_gravity")]
    g: f64,
    mu_s: f64,
}

fn default_gravity() -> f64 {
    STANDARD_GRAVITY
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    #[serde(default)]
    lo_deg: f64,
    #[serde(default = "default_hi_deg")]
    hi_deg: f64,
    #[serde(default = "default_tol_deg")]
    tol_deg: f64,
    #[serde(default = "default_max_iter")]
    max_iter: usize,
}

fn default_hi_deg() -> f64 {
    30.0
}
fn default_tol_deg() -> f64 {
    1e-10
}
fn default_max_iter() -> usize {
    64
}

impl Default for RawSolver {
    fn default() -> Self {
        Self {
            lo_deg: 0.0,
            hi_deg: 30.0,
            tol_deg: 1e-10,
            max_iter: 64,
        }
    }
}

/// Fully validated run configuration (internal units: radians, metres).
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub geometry: UnitGeometry,
    pub material: MaterialParams,
    pub solver: BisectionConfig,
    pub output_format: OutputFormat,
    pub output_path: Option<String>,
}

fn validation(e: ModelError) -> CliError {
    CliError::Validation(e.to_string())
}

/// Loads and validates a JSON config file. Every field is either present or
/// covered by a documented default; unknown keys are rejected.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let raw: RawConfig = serde_json::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))?;

    let delta = raw.geometry.delta.ok_or_else(|| {
        CliError::Validation(
            "missing field `delta` (socket-edge to cable distance, m): it has no published \
             reference value and must be supplied explicitly"
                .into(),
        )
    })?;
    let m = raw.material.m.ok_or_else(|| {
        CliError::Validation(
            "missing field `m` (unit mass, kg): it has no published reference value and must \
             be supplied explicitly"
                .into(),
        )
    })?;

    let geometry = UnitGeometry::new(
        raw.geometry.l,
        raw.geometry.r,
        delta,
        raw.geometry.theta1_deg.to_radians(),
        raw.geometry.theta2_deg.to_radians(),
    )
    .map_err(validation)?;
    let material =
        MaterialParams::with_gravity(m, raw.material.g, raw.material.mu_s).map_err(validation)?;
    let solver = BisectionConfig::new(
        raw.solver.lo_deg.to_radians(),
        raw.solver.hi_deg.to_radians(),
        raw.solver.tol_deg.to_radians(),
        raw.solver.max_iter,
    )
    .map_err(validation)?;

    Ok(RunConfig {
        geometry,
        material,
        solver,
        output_format: raw.output_format,
        output_path: raw.output_path,
    })
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

/// Formats a float with 17 significant digits (lossless f64 round-trip).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn json_num(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(x)
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}

fn json_opt(x: Option<f64>) -> serde_json::Value {
    x.map(json_num).unwrap_or(serde_json::Value::Null)
}

fn write_output(
    cfg: &RunConfig,
    out_override: Option<&str>,
    content: &str,
) -> Result<(), CliError> {
    let target = out_override.or(cfg.output_path.as_deref());
    match target {
        Some(path) => fs::write(path, content)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

const RECORD_HEADER: &str =
    "t_l,t_s,theta_deg,p_pa,residual_fx,residual_fz,residual_m,iterations,status";

struct RecordRow {
    t_l: f64,
    t_s: f64,
    theta_deg: Option<f64>,
    p: Option<f64>,
    residual_fx: Option<f64>,
    residual_fz: Option<f64>,
    residual_m: Option<f64>,
    iterations: usize,
    status: &'static str,
}

impl RecordRow {
    fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            fmt_f64(self.t_l),
            fmt_f64(self.t_s),
            fmt_opt(self.theta_deg),
            fmt_opt(self.p),
            fmt_opt(self.residual_fx),
            fmt_opt(self.residual_fz),
            fmt_opt(self.residual_m),
            self.iterations,
            self.status
        )
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "t_l": json_num(self.t_l),
            "t_s": json_num(self.t_s),
            "theta_deg": json_opt(self.theta_deg),
            "p_pa": json_opt(self.p),
            "residual_fx": json_opt(self.residual_fx),
            "residual_fz": json_opt(self.residual_fz),
            "residual_m": json_opt(self.residual_m),
            "iterations": self.iterations,
            "status": self.status,
        })
    }
}

fn emit_records(fmt: OutputFormat, rows: &[RecordRow]) -> String {
    match fmt {
        OutputFormat::Csv => {
            let mut s = String::from(RECORD_HEADER);
            s.push('\n');
            for r in rows {
                s.push_str(&r.to_csv());
                s.push('\n');
            }
            s
        }
        OutputFormat::Json => {
            let arr: Vec<_> = rows.iter().map(RecordRow::to_json).collect();
            let mut s = serde_json::to_string_pretty(&arr).expect("json serialization");
            s.push('\n');
            s
        }
    }
}

fn tension(t_l: f64, t_s: f64) -> Result<TensionInput, CliError> {
    TensionInput::new(t_l, t_s).map_err(|e| CliError::Input(e.to_string()))
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

/// `solve`: one equilibrium record for the given tensions.
pub fn run_solve(
    cfg: &RunConfig,
    t_l: f64,
    t_s: f64,
    fmt: Option<OutputFormat>,
    out: Option<&str>,
) -> Result<(), CliError> {
    let t = tension(t_l, t_s)?;
    let state = solve_unit(&t, &cfg.geometry, &cfg.material, &cfg.solver)?;
    let row = RecordRow {
        t_l,
        t_s,
        theta_deg: Some(state.theta.to_degrees()),
        p: Some(state.p),
        residual_fx: Some(state.residual_fx),
        residual_fz: Some(state.residual_fz),
        residual_m: Some(state.residual_m),
        iterations: state.iterations,
        status: if state.converged {
            "converged"
        } else {
            "max_iter"
        },
    };
    let content = emit_records(fmt.unwrap_or(cfg.output_format), &[row]);
    write_output(cfg, out, &content)?;
    if !state.converged {
        return Err(CliError::Solver(SolverError::NonConverged {
            lo: state.theta,
            hi: state.theta,
            iterations: state.iterations,
        }));
    }
    Ok(())
}

/// Inclusive `start:stop:step` grid with `step > 0`.
pub fn parse_range_spec(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Input(format!(
            "range spec '{spec}' must have the form start:stop:step"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| CliError::Input(format!("range spec '{spec}': '{p}' is not a number")))
        })
        .collect::<Result<_, _>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if step.is_nan() || step <= 0.0 {
        return Err(CliError::Input(format!(
            "range spec '{spec}': step must be > 0"
        )));
    }
    if stop < start {
        return Err(CliError::Input(format!(
            "range spec '{spec}': stop must be >= start"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}

/// `sweep`: cartesian product of two tension range specs, row-major table.
/// Exit is success as long as the batch ran, even with per-record failures.
pub fn run_sweep(
    cfg: &RunConfig,
    t_l_spec: &str,
    t_s_spec: &str,
    fmt: Option<OutputFormat>,
    out: Option<&str>,
) -> Result<(), CliError> {
    let tl = parse_range_spec(t_l_spec)?;
    let ts = parse_range_spec(t_s_spec)?;
    if tl.iter().chain(ts.iter()).any(|&x| x < 0.0) {
        return Err(CliError::Input("tensions must be >= 0".into()));
    }
    let records = sweep(&tl, &ts, &cfg.geometry, &cfg.material, &cfg.solver);
    let rows: Vec<RecordRow> = records.iter().map(sweep_row).collect();
    let content = emit_records(fmt.unwrap_or(cfg.output_format), &rows);
    write_output(cfg, out, &content)
}

fn sweep_row(r: &SweepRecord) -> RecordRow {
    RecordRow {
        t_l: r.t_l,
        t_s: r.t_s,
        theta_deg: r.theta.map(f64::to_degrees),
        p: r.p,
        residual_fx: None,
        residual_fz: None,
        residual_m: None,
        iterations: r.iterations,
        status: r.status.as_str(),
    }
}

/// `curve`: the equilibrium function and pressure tabulated over `[0, 30]`
/// degrees at `step_deg`, for external plotting.
pub fn run_curve(
    cfg: &RunConfig,
    t_l: f64,
    t_s: f64,
    step_deg: f64,
    fmt: Option<OutputFormat>,
    out: Option<&str>,
) -> Result<(), CliError> {
    if step_deg.is_nan() || step_deg <= 0.0 || step_deg > 30.0 {
        return Err(CliError::Input(format!(
            "step must satisfy 0 < step <= 30 degrees, got {step_deg}"
        )));
    }
    let t = tension(t_l, t_s)?;
    let n = ((30.0 / step_deg) + 1e-9).floor() as usize;
    let grid_deg: Vec<f64> = (0..=n).map(|k| k as f64 * step_deg).collect();
    let grid: Vec<f64> = grid_deg.iter().map(|d| d.to_radians()).collect();
    let samples = sample_curve(&t, &cfg.geometry, &cfg.material, &grid);

    let content = match fmt.unwrap_or(cfg.output_format) {
        OutputFormat::Csv => {
            let mut s = String::from("theta_deg,f_value,p_value,feasible\n");
            for (deg, smp) in grid_deg.iter().zip(&samples) {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    fmt_f64(*deg),
                    fmt_opt(smp.f_value),
                    fmt_opt(smp.p_value),
                    smp.f_value.is_some()
                );
            }
            s
        }
        OutputFormat::Json => {
            let arr: Vec<_> = grid_deg
                .iter()
                .zip(&samples)
                .map(|(deg, smp)| {
                    serde_json::json!({
                        "theta_deg": json_num(*deg),
                        "f_value": json_opt(smp.f_value),
                        "p_value": json_opt(smp.p_value),
                        "feasible": smp.f_value.is_some(),
                    })
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&arr).expect("json serialization");
            s.push('\n');
            s
        }
    };
    write_output(cfg, out, &content)
}

/// `validate`: solve, verify and cross-check against the grid-scan oracle.
/// Exit 0 iff every check passes.
pub fn run_validate(cfg: &RunConfig, t_l: f64, t_s: f64) -> Result<(), CliError> {
    let t = tension(t_l, t_s)?;
    let state = solve_unit(&t, &cfg.geometry, &cfg.material, &cfg.solver)?;
    let report = verify_state(&state, &t, &cfg.geometry, &cfg.material);

    let oracle_step = 0.01_f64.to_radians();
    let t_scan = if state.theta < 0.0 {
        TensionInput {
            t_l: t.t_s,
            t_s: t.t_l,
        }
    } else {
        t
    };
    let intervals = oracle_scan(&t_scan, &cfg.geometry, &cfg.material, oracle_step);
    let theta_abs = state.theta.abs();
    let oracle_ok = intervals
        .iter()
        .any(|iv| iv.lo - oracle_step <= theta_abs && theta_abs <= iv.hi + oracle_step);

    let mut out = String::new();
    let _ = writeln!(out, "{report}");
    let _ = writeln!(
        out,
        "[{}] oracle-agreement          bisection root {:.9} deg vs {} scan interval(s) at 0.01 deg",
        if oracle_ok { "pass" } else { "FAIL" },
        state.theta.to_degrees(),
        intervals.len()
    );
    let all = report.passed && oracle_ok;
    let _ = writeln!(
        out,
        "result: {}",
        if all {
            "all checks passed"
        } else {
            "checks FAILED"
        }
    );
    write_output(cfg, None, &out)?;
    if all {
        Ok(())
    } else {
        Err(CliError::ChecksFailed)
    }
}
