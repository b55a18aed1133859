//! Literal parsing shared by the library and the command line.

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Parses a float, also accepting `p/q` rational literals.
pub fn parse_f64(s: &str) -> Result<f64> {
    let s = s.trim();
    if s.contains('/') {
        return Ok(s.parse::<Rational>()?.to_f64());
    }
    let v: f64 = s
        .parse()
        .map_err(|_| Error::Parse(format!("invalid number {s:?}")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Parse(format!("non-finite number {s:?}")))
    }
}

/// Splits a comma-separated list, ignoring surrounding whitespace.
pub fn split_list(s: &str) -> Vec<&str> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .collect()
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    split_list(s).into_iter().map(parse_f64).collect()
}

pub fn parse_rational_list(s: &str) -> Result<Vec<Rational>> {
    split_list(s).into_iter().map(str::parse).collect()
}
