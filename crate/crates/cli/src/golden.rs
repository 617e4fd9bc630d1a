//! Golden files: recorded experiment outputs that `verify` reruns and
//! compares.
//!
//! Each file holds `{ "args": [...], "tolerance": t, "expected": {...} }`,
//! where `args` is the command line after the binary name, `expected` is
//! the JSON report, and `tolerance` (absolute, default 0) bounds numeric
//! differences.

use std::path::{Path, PathBuf};

use clap::Parser;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::Cli;
use crate::run::{run, CliError};

#[derive(Debug, Serialize, Deserialize)]
pub struct GoldenFile {
    pub args: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub expected: Value,
}

/// The recorded experiments: file stem and command line.
pub const EXPERIMENTS: &[(&str, &[&str])] = &[
    ("gamma", &["gamma", "--R", "5"]),
    ("moments", &["moments", "--R", "1e4", "--k", "1..4", "--L", "100", "--pair-k", "50"]),
    ("ck", &["ck", "--R", "1e4", "--k", "1..8"]),
    ("model_ck", &["model-ck", "--k", "1", "--samples", "1e6", "--seed", "42"]),
    ("avg_ck", &["avg-ck", "--R", "1e4", "--L", "100"]),
    ("pair_corr", &["pair-corr", "--R", "1e4", "--k", "50"]),
    ("mixed_corr", &["mixed-corr", "--R", "1e4", "--k", "39"]),
    ("joint_hist", &["joint-hist", "--R", "1e4", "--k", "200", "--bins", "4"]),
    ("sector_var", &["sector-var", "--R", "1e4"]),
    ("equidist", &["equidist", "--R", "1e3", "--c", "0.3", "--d", "1.2"]),
    ("diag_rect", &["diag-rect", "--R", "1e3", "--k", "4", "--cprime", "1"]),
    ("limit_dist", &["limit-dist", "--R", "1e4", "--samples", "1e5", "--seed", "7"]),
];

/// Absolute tolerance written into recorded files. Everything is
/// deterministic; the slack only absorbs libm differences across platforms.
pub const RECORD_TOLERANCE: f64 = 1e-9;

fn run_args(args: &[String]) -> Result<Value, CliError> {
    let cli = Cli::try_parse_from(std::iter::once("annulus".to_string()).chain(args.iter().cloned()))
        .map_err(|e| CliError::Validation(e.to_string()))?;
    Ok(run(&cli.command)?.json)
}

pub fn record(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Internal(format!("{}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for (stem, args) in EXPERIMENTS {
        let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let expected = run_args(&args)?;
        let file = GoldenFile { args, tolerance: Some(RECORD_TOLERANCE), expected };
        let path = dir.join(format!("{stem}.json"));
        let body = serde_json::to_string_pretty(&file).expect("serialises") + "\n";
        std::fs::write(&path, body).map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}

/// Paths where `actual` differs from `expected` by more than `tol`.
pub fn diff(expected: &Value, actual: &Value, tol: f64) -> Vec<String> {
    let mut out = Vec::new();
    diff_into(expected, actual, tol, "$", &mut out);
    out
}

fn diff_into(e: &Value, a: &Value, tol: f64, path: &str, out: &mut Vec<String>) {
    match (e, a) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap_or(f64::NAN), y.as_f64().unwrap_or(f64::NAN));
            if !((x - y).abs() <= tol) {
                out.push(format!("{path}: expected {x}, got {y}"));
            }
        }
        (Value::Array(xs), Value::Array(ys)) => {
            if xs.len() != ys.len() {
                out.push(format!("{path}: expected {} items, got {}", xs.len(), ys.len()));
                return;
            }
            for (i, (x, y)) in xs.iter().zip(ys).enumerate() {
                diff_into(x, y, tol, &format!("{path}[{i}]"), out);
            }
        }
        (Value::Object(xs), Value::Object(ys)) => {
            for (k, x) in xs {
                match ys.get(k) {
                    Some(y) => diff_into(x, y, tol, &format!("{path}.{k}"), out),
                    None => out.push(format!("{path}.{k}: missing")),
                }
            }
            for k in ys.keys().filter(|k| !xs.contains_key(*k)) {
                out.push(format!("{path}.{k}: unexpected"));
            }
        }
        _ if e == a => {}
        _ => out.push(format!("{path}: expected {e}, got {a}")),
    }
}

pub struct VerifyRow {
    pub name: String,
    pub diffs: Vec<String>,
}

pub fn verify(dir: &Path) -> Result<Vec<VerifyRow>, CliError> {
    if !dir.is_dir() {
        return Err(CliError::Validation(format!("golden directory {} not found", dir.display())));
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::Internal(e.to_string()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Validation(format!("no golden files in {}", dir.display())));
    }
    let mut rows = Vec::new();
    for path in files {
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?;
        let golden: GoldenFile =
            serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        let diffs = match run_args(&golden.args) {
            Ok(actual) => diff(&golden.expected, &actual, golden.tolerance.unwrap_or(0.0)),
            Err(e) => vec![e.to_string()],
        };
        rows.push(VerifyRow { name, diffs });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn diff_reports_paths() {
        let e = json!({ "a": 1.0, "b": [1, 2], "c": "x" });
        assert!(diff(&e, &e, 0.0).is_empty());
        let a = json!({ "a": 1.5, "b": [1, 2, 3], "c": "y", "d": 0 });
        let d = diff(&e, &a, 0.1);
        assert_eq!(d.len(), 4, "{d:?}");
        assert!(diff(&e, &json!({ "a": 1.05, "b": [1, 2], "c": "x" }), 0.1).is_empty());
    }
}
