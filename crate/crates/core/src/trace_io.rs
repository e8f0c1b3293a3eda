//! Run records: options, trace and termination of a solve, plus enough about
//! the problem (builder, parameters, input digests) to reproduce it.
//!
//! A record is written as one JSON document with a fixed key order and every
//! float printed with 17 significant digits, next to a CSV with one row per
//! iteration. Reading is strict: unknown keys and other schema versions are
//! rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::{Options, SolveResult, StopRule, Termination, Trace};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u64 = 1;

/// Hex SHA-256 of `bytes`.
pub fn digest_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// The serialisable part of [`Options`]; callbacks are recorded only as
/// present or absent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsSnapshot {
    pub verbose: u8,
    pub tol: f64,
    pub max_iters: usize,
    pub record_objective: bool,
    pub record_iterates: bool,
    pub adaptive: bool,
    pub accelerate: bool,
    pub restart: bool,
    pub backtrack: bool,
    pub tau: Option<f64>,
    pub lipschitz: Option<f64>,
    pub stop_rule: StopRule,
    pub string_header: String,
    pub seed: u64,
    pub has_monitor: bool,
    pub has_stop_now: bool,
}

impl From<&Options> for OptionsSnapshot {
    fn from(o: &Options) -> Self {
        OptionsSnapshot {
            verbose: o.verbose,
            tol: o.tol,
            max_iters: o.max_iters,
            record_objective: o.record_objective,
            record_iterates: o.record_iterates,
            adaptive: o.adaptive,
            accelerate: o.accelerate,
            restart: o.restart,
            backtrack: o.backtrack,
            tau: o.tau,
            lipschitz: o.lipschitz,
            stop_rule: o.stop_rule,
            string_header: o.string_header.clone(),
            seed: o.seed,
            has_monitor: o.monitor.is_some(),
            has_stop_now: o.stop_now.is_some(),
        }
    }
}

impl OptionsSnapshot {
    /// Options with the recorded settings and no callbacks.
    pub fn to_options(&self) -> Options {
        Options {
            verbose: self.verbose,
            tol: self.tol,
            max_iters: self.max_iters,
            record_objective: self.record_objective,
            record_iterates: self.record_iterates,
            adaptive: self.adaptive,
            accelerate: self.accelerate,
            restart: self.restart,
            monitor: None,
            backtrack: self.backtrack,
            tau: self.tau,
            lipschitz: self.lipschitz,
            stop_rule: self.stop_rule,
            stop_now: None,
            string_header: self.string_header.clone(),
            seed: self.seed,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDescriptor {
    pub builder: String,
    pub parameters: BTreeMap<String, f64>,
    /// Input name to hex SHA-256 of the bytes that were read.
    pub data_digests: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRecord {
    pub schema_version: u64,
    pub problem: ProblemDescriptor,
    pub seed: u64,
    pub options: OptionsSnapshot,
    pub termination: Termination,
    pub trace: Trace,
}

impl RunRecord {
    pub fn new(problem: ProblemDescriptor, seed: u64, options: &Options, result: &SolveResult) -> Self {
        RunRecord {
            schema_version: SCHEMA_VERSION,
            problem,
            seed,
            options: options.into(),
            termination: result.termination,
            trace: result.trace.clone(),
        }
    }
}

/// Compact JSON with floats printed to 17 significant digits.
struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{value:.8e}")
    }
}

pub fn to_json(record: &RunRecord) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision);
    record
        .serialize(&mut ser)
        .map_err(|e| Error::invalid(format!("cannot serialise run record: {e}")))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// Per-iteration CSV: `iteration, residual, normalized_residual, stepsize`,
/// then `objective` when it was recorded, then `func_value`.
pub fn to_csv(trace: &Trace) -> String {
    let with_objective = !trace.objective.is_empty();
    let mut out = String::from("iteration,residual,normalized_residual,stepsize");
    if with_objective {
        out.push_str(",objective");
    }
    out.push_str(",func_value\n");
    for i in 0..trace.iteration_count {
        let _ = write!(
            out,
            "{},{:.16e},{:.16e},{:.16e}",
            i + 1,
            trace.residuals[i],
            trace.normalized_residuals[i],
            trace.stepsizes[i]
        );
        if with_objective {
            let _ = write!(out, ",{:.16e}", trace.objective[i]);
        }
        let _ = writeln!(out, ",{:.16e}", trace.func_values[i]);
    }
    out
}

/// Sibling CSV path for a run document: same stem, `.csv` extension.
pub fn csv_path(path: &Path) -> PathBuf {
    path.with_extension("csv")
}

/// Writes the JSON document to `path` and the trace CSV next to it.
pub fn write_run(record: &RunRecord, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let json = to_json(record)?;
    fs::write(path, json).map_err(|e| Error::io(path, e))?;
    let csv = csv_path(path);
    fs::write(&csv, to_csv(&record.trace)).map_err(|e| Error::io(csv, e))
}

pub fn read_run(path: impl AsRef<Path>) -> Result<RunRecord> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_json(&text, path)
}

/// Parses a run document; `path` is only used in error messages.
pub fn from_json(text: &str, path: &Path) -> Result<RunRecord> {
    let parse_error = |e: serde_json::Error| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    };
    let value: serde_json::Value = serde_json::from_str(text).map_err(parse_error)?;
    let version = value
        .get("schema_version")
        .ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            column: 1,
            message: "missing field `schema_version`".into(),
        })?
        .as_u64()
        .ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            column: 1,
            message: "`schema_version` is not an unsigned integer".into(),
        })?;
    if version != SCHEMA_VERSION {
        return Err(Error::SchemaVersion {
            path: path.to_path_buf(),
            found: version,
            expected: SCHEMA_VERSION,
        });
    }
    serde_json::from_str(text).map_err(parse_error)
}
