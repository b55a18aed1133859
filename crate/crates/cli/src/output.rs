//! Report envelopes, serialisation and error reporting.

use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

/// Version of the JSON report layout.
pub const SCHEMA: u32 = 1;

/// Every error ends the run with exit code 2. `flag` names the argument the
/// error is about, when there is one.
#[derive(Debug)]
pub struct CliError {
    flag: Option<&'static str>,
    message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            flag: None,
            message: message.into(),
        }
    }

    pub fn at(flag: &'static str) -> impl Fn(kedlaya_core::Error) -> CliError {
        move |e| CliError {
            flag: Some(flag),
            message: e.to_string(),
        }
    }
}

impl From<kedlaya_core::Error> for CliError {
    fn from(e: kedlaya_core::Error) -> Self {
        CliError::usage(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.flag {
            Some(flag) => write!(f, "{flag}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// A formatted report and whether the run found a violation or an
/// inconsistency.
pub struct Rendered {
    pub body: String,
    pub failed: bool,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: u32,
    command: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

pub fn json<T: Serialize>(command: &str, body: &T) -> Result<String, CliError> {
    let env = Envelope {
        schema: SCHEMA,
        command,
        body,
    };
    let mut s = serde_json::to_string_pretty(&env).map_err(|e| CliError::usage(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| CliError::usage(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::usage(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::usage(e.to_string()))
}

pub fn write(body: &str, path: Option<&Path>) -> Result<(), CliError> {
    let res = match path {
        Some(p) => std::fs::write(p, body),
        None => std::io::stdout().lock().write_all(body.as_bytes()),
    };
    res.map_err(|e| CliError::usage(format!("cannot write report: {e}")))
}

/// Writes whitespace-separated rows, one per line, for gnuplot.
pub fn write_data(
    path: &Path,
    header: &str,
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> Result<(), CliError> {
    let mut s = format!("# {header}\n");
    for row in rows {
        let cols: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        s.push_str(&cols.join(" "));
        s.push('\n');
    }
    std::fs::write(path, s)
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

/// A signed number with its sign set apart: `[+]`, `[-]` or `[=]` when the
/// magnitude is within `tol`.
pub fn signed(v: f64, tol: f64) -> String {
    let mark = if v.abs() <= tol {
        "[=]"
    } else if v > 0.0 {
        "[+]"
    } else {
        "[-]"
    };
    format!("{mark} {v:+.15e}")
}
