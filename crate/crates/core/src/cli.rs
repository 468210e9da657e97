//! Command-line front end: JSON in, JSON or CSV reports out.
//!
//! [`run`] does all the work so the binary stays a thin argument parser and
//! the same code path is exercised by the integration tests.

use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cbmaps::{cb_norm_detailed, norm_lower, CbNormReport, LinearMatrixMap};
use crate::error::Error;
use crate::haagerup::{
    col_norm, elementary_operator, haagerup_norm_factorized, minimal_length, row_norm, HaagerupTensor,
};
use crate::matrix::BlockMatrix;
use crate::schur::{
    apply_symbol, counterexample_report, multiplier_norm_with, scalar_factorization, tail_report, MultiplierNorm,
    SchurSymbol,
};
use crate::sdp::SdpStatus;
use crate::suite::{self, SuiteConfig};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_RESTARTS: usize = crate::cbmaps::DEFAULT_RESTARTS;
const FACTORIZED_ITERS: usize = 300;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Norm,
    Cbnorm,
    Haagerup,
    SchurApply,
    SchurNorm,
    Factorize,
    TailReport,
    Counterexample,
    CheckSuite,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Norm => "norm",
            Command::Cbnorm => "cbnorm",
            Command::Haagerup => "haagerup",
            Command::SchurApply => "schur-apply",
            Command::SchurNorm => "schur-norm",
            Command::Factorize => "factorize",
            Command::TailReport => "tail-report",
            Command::Counterexample => "counterexample",
            Command::CheckSuite => "check-suite",
        }
    }

    fn needs_input(self) -> bool {
        !matches!(self, Command::Counterexample | Command::CheckSuite)
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub input_path: Option<PathBuf>,
    /// Report destination; `None` returns the report to the caller.
    pub output_path: Option<PathBuf>,
    pub tol: f64,
    pub seed: u64,
    pub restarts: usize,
    pub csv: bool,
    /// Include wall-clock timings in the report. Off by default so reports
    /// are byte-identical across runs.
    pub timings: bool,
    /// `counterexample`: number of blocks.
    pub k: usize,
    /// `counterexample`: weights `α_k = k^(-power)`.
    pub power: f64,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            input_path: None,
            output_path: None,
            tol: DEFAULT_TOL,
            seed: 0,
            restarts: DEFAULT_RESTARTS,
            csv: false,
            timings: false,
            k: 4,
            power: 1.0,
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    /// The report text, also written to `output_path` when one was given.
    pub report: Option<String>,
    /// Human-readable diagnostics (errors, failed criteria, elapsed time).
    pub diagnostics: String,
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SolverFailure(_) | Error::DependentConstraints => EXIT_FAILURE,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Run one command. Never panics on bad input; every problem becomes an
/// exit code and a diagnostic.
pub fn run(config: &RunConfig) -> RunOutcome {
    let start = Instant::now();
    let result = execute(config).and_then(|report| {
        let (text, failed) = render(config, report, start.elapsed().as_secs_f64())?;
        if let Some(path) = &config.output_path {
            std::fs::write(path, &text).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
        }
        Ok((text, failed))
    });
    let elapsed = format!("{}: {:.3}s", config.command.name(), start.elapsed().as_secs_f64());
    match result {
        Ok((text, failed)) => RunOutcome {
            exit_code: if failed.is_empty() { EXIT_OK } else { EXIT_FAILURE },
            report: Some(text),
            diagnostics: if failed.is_empty() {
                elapsed
            } else {
                format!("{failed}\n{elapsed}")
            },
        },
        Err(f) => RunOutcome {
            exit_code: f.code,
            report: None,
            diagnostics: format!("error: {}", f.message),
        },
    }
}

/// A computed report: either one record or a table of rows. `failed`
/// carries check failures that should turn the exit code to 1.
struct Report {
    body: Body,
    failed: String,
}

enum Body {
    Record(serde_json::Value),
    Table(Vec<serde_json::Value>),
    /// Structured output (matrices, vectors) with no CSV rendering.
    Structured(serde_json::Value),
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn record<T: Serialize>(v: &T) -> Report {
    Report {
        body: Body::Record(to_value(v)),
        failed: String::new(),
    }
}

fn table<T: Serialize>(rows: &[T]) -> Report {
    Report {
        body: Body::Table(rows.iter().map(to_value).collect()),
        failed: String::new(),
    }
}

fn read_input<T: DeserializeOwned>(config: &RunConfig) -> Result<T, Failure> {
    let path = config
        .input_path
        .as_ref()
        .ok_or_else(|| Failure::input(format!("{} needs an input file", config.command.name())))?;
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    parse_input(&text).map_err(|m| Failure::input(format!("{}: {m}", path.display())))
}

/// Parse with a field path and line/column in the error message.
pub fn parse_input<T: DeserializeOwned>(text: &str) -> Result<T, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut *de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.line() == 0 && path == "." {
            format!("top-level object: {inner}")
        } else if path == "." || path == "?" {
            inner.to_string()
        } else {
            format!("field `{path}`: {inner}")
        }
    })?;
    de.end().map_err(|e| e.to_string())?;
    Ok(value)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct NormReport {
    norm_lb: f64,
    status: &'static str,
    restarts: usize,
    seed: u64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CbReport {
    cb: f64,
    status: SdpStatus,
    gap: f64,
    iterations: usize,
    tol: f64,
}

impl From<CbNormReport> for CbReport {
    fn from(r: CbNormReport) -> Self {
        Self {
            cb: r.value,
            status: r.status,
            gap: r.gap,
            iterations: r.iterations,
            tol: r.tol,
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct HaagerupReport {
    sdp: f64,
    sdp_status: SdpStatus,
    sdp_gap: f64,
    sdp_iterations: usize,
    factorized: f64,
    factorized_converged: bool,
    row_norm: f64,
    col_norm: f64,
    length: usize,
    minimal_length: usize,
    tol: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ApplyInput {
    symbol: SchurSymbol,
    blocks: BlockMatrix,
}

#[derive(Serialize)]
struct ApplyReport {
    status: &'static str,
    result: BlockMatrix,
}

fn execute(config: &RunConfig) -> Result<Report, Failure> {
    if !(config.tol > 0.0 && config.tol < 1.0) {
        return Err(Failure::input(format!("--tol {} outside (0, 1)", config.tol)));
    }
    if config.restarts == 0 {
        return Err(Failure::input("--restarts must be at least 1"));
    }
    if !config.command.needs_input() && config.input_path.is_some() {
        return Err(Failure::input(format!("{} takes no input file", config.command.name())));
    }
    let (tol, seed, restarts) = (config.tol, config.seed, config.restarts);
    Ok(match config.command {
        Command::Norm => {
            let m: LinearMatrixMap = read_input(config)?;
            record(&NormReport {
                norm_lb: norm_lower(&m, restarts, seed),
                status: "lower-bound",
                restarts,
                seed,
            })
        }
        Command::Cbnorm => {
            let m: LinearMatrixMap = read_input(config)?;
            record(&CbReport::from(cb_norm_detailed(&m, tol)?))
        }
        Command::Haagerup => {
            let v: HaagerupTensor = read_input(config)?;
            let sdp = cb_norm_detailed(&elementary_operator(&v), tol)?;
            let (factorized, converged) = if v.is_empty() {
                (0.0, true)
            } else {
                let f = haagerup_norm_factorized(&v, FACTORIZED_ITERS, tol)?;
                (f.value, f.converged)
            };
            record(&HaagerupReport {
                sdp: sdp.value,
                sdp_status: sdp.status,
                sdp_gap: sdp.gap,
                sdp_iterations: sdp.iterations,
                factorized,
                factorized_converged: converged,
                row_norm: row_norm(&v),
                col_norm: col_norm(&v),
                length: v.len(),
                minimal_length: minimal_length(&v).len(),
                tol,
            })
        }
        Command::SchurApply => {
            let input: ApplyInput = read_input(config)?;
            Report {
                body: Body::Structured(to_value(&ApplyReport {
                    status: "exact",
                    result: apply_symbol(&input.symbol, &input.blocks)?,
                })),
                failed: String::new(),
            }
        }
        Command::SchurNorm => {
            let phi: SchurSymbol = read_input(config)?;
            let r: MultiplierNorm = multiplier_norm_with(&phi, tol, restarts, seed)?;
            record(&r)
        }
        Command::Factorize => {
            let phi: SchurSymbol = read_input(config)?;
            Report {
                body: Body::Structured(to_value(&scalar_factorization(&phi, tol)?)),
                failed: String::new(),
            }
        }
        Command::TailReport => {
            let phi: SchurSymbol = read_input(config)?;
            let rows: Vec<_> = tail_report(&phi, tol)?
                .into_iter()
                .map(|r| TailLine {
                    n: r.n,
                    tail: r.tail,
                    corner_tail: r.corner_tail,
                    tol,
                })
                .collect();
            table(&rows)
        }
        Command::Counterexample => {
            if !config.power.is_finite() {
                return Err(Failure::input("--power must be finite"));
            }
            let power = config.power;
            table(&counterexample_report(
                config.k,
                |k| (k as f64).powf(-power),
                tol,
                restarts,
                seed,
            )?)
        }
        Command::CheckSuite => {
            let cfg = SuiteConfig { tol, seed, restarts };
            let mut results = suite::run_all(&cfg)?;
            let failed: Vec<String> = results.iter().filter(|r| !r.passed).map(|r| r.to_string()).collect();
            if !config.timings {
                for r in &mut results {
                    r.seconds = None;
                }
            }
            if config.csv {
                let rows: Vec<SuiteLine> = results.iter().flat_map(SuiteLine::from_result).collect();
                Report {
                    failed: failed.join("\n"),
                    ..table(&rows)
                }
            } else {
                Report {
                    failed: failed.join("\n"),
                    ..table(&results)
                }
            }
        }
    })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct TailLine {
    n: usize,
    tail: f64,
    corner_tail: f64,
    tol: f64,
}

/// One CSV line per sub-check of a criterion.
#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SuiteLine {
    id: u32,
    criterion: &'static str,
    check: String,
    worst: f64,
    threshold: f64,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    seconds: Option<f64>,
}

impl SuiteLine {
    fn from_result(r: &suite::CriterionResult) -> Vec<Self> {
        r.checks
            .iter()
            .map(|c| SuiteLine {
                id: r.id,
                criterion: r.name,
                check: c.what.clone(),
                worst: c.worst,
                threshold: c.threshold,
                passed: c.passed,
                seconds: r.seconds,
            })
            .collect()
    }
}

#[derive(Serialize)]
struct EnvelopeConfig {
    tol: f64,
    seed: u64,
    restarts: usize,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Envelope<'a> {
    command: &'static str,
    config: EnvelopeConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    rows: Option<&'a [serde_json::Value]>,
    #[serde(flatten)]
    record: Option<&'a serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seconds: Option<f64>,
}

fn render(config: &RunConfig, report: Report, seconds: f64) -> Result<(String, String), Failure> {
    let text = if config.csv {
        let rows = match &report.body {
            Body::Record(v) => std::slice::from_ref(v),
            Body::Table(rows) => rows.as_slice(),
            Body::Structured(_) => {
                return Err(Failure::input(format!(
                    "{} produces matrices; --csv is not available for it",
                    config.command.name()
                )))
            }
        };
        csv_text(rows)
    } else {
        let (rows, record) = match &report.body {
            Body::Record(v) | Body::Structured(v) => (None, Some(v)),
            Body::Table(rows) => (Some(rows.as_slice()), None),
        };
        let env = Envelope {
            command: config.command.name(),
            config: EnvelopeConfig {
                tol: config.tol,
                seed: config.seed,
                restarts: config.restarts,
            },
            rows,
            record,
            seconds: config.timings.then_some(seconds),
        };
        let mut s = serde_json::to_string_pretty(&env).expect("report serializes");
        s.push('\n');
        s
    };
    Ok((text, report.failed))
}

/// CSV with the keys of the first row as header, in field order.
fn csv_text(rows: &[serde_json::Value]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = match rows.first() {
        Some(serde_json::Value::Object(m)) => m.keys().cloned().collect(),
        _ => Vec::new(),
    };
    if !header.is_empty() {
        w.write_record(&header).expect("in-memory write");
    }
    for row in rows {
        let fields: Vec<String> = header
            .iter()
            .map(|k| match &row[k] {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Null => String::new(),
                other => other.to_string(),
            })
            .collect();
        w.write_record(&fields).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}
