//! Report envelope, named tolerances and the error object.

use std::collections::BTreeMap;

use ncdg_core::Error;
use serde::Serialize;
use serde_json::Value;

/// A residual compared against a named tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Failing an enforced check makes the run exit with status 1; the others
    /// are informational.
    pub enforced: bool,
}

/// Tolerances a subcommand judges its residuals with, after overrides.
#[derive(Debug, Clone)]
pub struct Tolerances {
    values: BTreeMap<String, f64>,
}

impl Tolerances {
    /// Applies `name=value` overrides to a subcommand's defaults. Unknown
    /// names and unparsable values are input errors.
    pub fn resolve(defaults: &[(&str, f64)], overrides: &[String]) -> Result<Self, CliError> {
        let mut values: BTreeMap<String, f64> = defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        for item in overrides {
            let (name, raw) = item
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("tolerance override '{item}' is not of the form name=value")))?;
            let slot = values.get_mut(name).ok_or_else(|| {
                let known: Vec<&str> = defaults.iter().map(|(k, _)| *k).collect();
                CliError::usage(format!("unknown tolerance '{name}'; this subcommand knows {known:?}"))
            })?;
            let v: f64 = raw.parse().map_err(|_| CliError::usage(format!("tolerance '{name}' needs a number")))?;
            if !(v.is_finite() && v >= 0.0) {
                return Err(CliError::usage(format!("tolerance '{name}' must be finite and nonnegative")));
            }
            *slot = v;
        }
        Ok(Tolerances { values })
    }

    pub fn get(&self, name: &str) -> f64 {
        self.values[name]
    }

    pub fn as_map(&self) -> &BTreeMap<String, f64> {
        &self.values
    }
}

/// What a subcommand hands back to the driver.
#[derive(Debug, Default)]
pub struct Outcome {
    pub result: Value,
    pub checks: Vec<Check>,
    /// Set when the computation itself did not finish (e.g. no convergence).
    pub failure: Option<String>,
    /// `(step, action, gradient_norm)` rows for the CSV trace.
    pub trace: Option<Vec<(usize, f64, f64)>>,
}

impl Outcome {
    pub fn new(result: Value) -> Self {
        Outcome { result, ..Default::default() }
    }

    /// Records `value ≤ tol[name]`.
    pub fn check(&mut self, tol: &Tolerances, name: &str, value: f64, enforced: bool) {
        let tolerance = tol.get(name);
        self.checks.push(Check { name: name.into(), value, tolerance, passed: value <= tolerance, enforced });
    }

    /// Records a yes/no condition as a residual of 0 or 1 against tolerance 0.
    pub fn require(&mut self, name: &str, ok: bool) {
        let value = if ok { 0.0 } else { 1.0 };
        self.checks.push(Check { name: name.into(), value, tolerance: 0.0, passed: ok, enforced: true });
    }

    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.checks.iter().all(|c| c.passed || !c.enforced)
    }
}

#[derive(Debug, Serialize)]
pub struct Report<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: Value,
    pub tolerances: &'a BTreeMap<String, f64>,
    pub result: &'a Value,
    pub checks: &'a [Check],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<&'a str>,
    pub passed: bool,
}

/// Anything that ends a run early, with the exit status it maps to.
#[derive(Debug)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { kind: "usage".into(), message: message.into(), exit_code: 2 }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError { kind: "io".into(), message: message.into(), exit_code: 2 }
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "error": { "kind": self.kind, "message": self.message, "exit_code": self.exit_code }
        })
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        // Bad numbers of any kind in the input are the caller's problem; only
        // a failed numerical check inside a computation is ours.
        let exit_code = match e {
            Error::Numerical(_) => 1,
            _ => 2,
        };
        CliError { kind: e.kind().into(), message: e.to_string(), exit_code }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError { kind: "parse".into(), message: e.to_string(), exit_code: 2 }
    }
}
