//! Real intervals used as mean domains.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real interval with optional (infinite) bounds and open/closed flags.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub lower_closed: bool,
    pub upper_closed: bool,
}

impl Interval {
    pub const REAL: Interval = Interval {
        lower: None,
        upper: None,
        lower_closed: false,
        upper_closed: false,
    };

    /// `(0, ∞)`.
    pub const POSITIVE: Interval = Interval {
        lower: Some(0.0),
        upper: None,
        lower_closed: false,
        upper_closed: false,
    };

    /// `[0, ∞)`.
    pub const NONNEGATIVE: Interval = Interval {
        lower: Some(0.0),
        upper: None,
        lower_closed: true,
        upper_closed: false,
    };

    pub fn new(
        lower: Option<f64>,
        upper: Option<f64>,
        lower_closed: bool,
        upper_closed: bool,
    ) -> Result<Self> {
        let iv = Interval {
            lower,
            upper,
            lower_closed: lower_closed && lower.is_some(),
            upper_closed: upper_closed && upper.is_some(),
        };
        if lower.is_some_and(|a| !a.is_finite()) || upper.is_some_and(|b| !b.is_finite()) {
            return Err(Error::InvalidInterval(format!(
                "{iv}: bounds must be finite or absent"
            )));
        }
        if let (Some(a), Some(b)) = (lower, upper) {
            let empty = a > b || (a == b && !(iv.lower_closed && iv.upper_closed));
            if empty {
                return Err(Error::InvalidInterval(format!("{iv} is empty")));
            }
        }
        Ok(iv)
    }

    pub fn closed(a: f64, b: f64) -> Result<Self> {
        Self::new(Some(a), Some(b), true, true)
    }

    pub fn open(a: f64, b: f64) -> Result<Self> {
        Self::new(Some(a), Some(b), false, false)
    }

    pub fn contains(&self, x: f64) -> bool {
        if x.is_nan() {
            return false;
        }
        let lower_ok = match self.lower {
            None => x.is_finite() || x == f64::INFINITY,
            Some(a) => x > a || (self.lower_closed && x == a),
        };
        let upper_ok = match self.upper {
            None => x.is_finite() || x == f64::NEG_INFINITY,
            Some(b) => x < b || (self.upper_closed && x == b),
        };
        lower_ok && upper_ok && x.is_finite()
    }

    /// Whether `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        let lower_ok = match (self.lower, other.lower) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(c)) => a > c || (a == c && (other.lower_closed || !self.lower_closed)),
        };
        let upper_ok = match (self.upper, other.upper) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(b), Some(d)) => b < d || (b == d && (other.upper_closed || !self.upper_closed)),
        };
        lower_ok && upper_ok
    }

    /// Image under `x ↦ a·x + b` with `a ≠ 0`.
    pub fn affine_image(&self, a: f64, b: f64) -> Result<Interval> {
        if a == 0.0 {
            return Err(Error::ZeroScale);
        }
        let map = |v: Option<f64>| v.map(|v| a * v + b);
        if a > 0.0 {
            Interval::new(
                map(self.lower),
                map(self.upper),
                self.lower_closed,
                self.upper_closed,
            )
        } else {
            Interval::new(
                map(self.upper),
                map(self.lower),
                self.upper_closed,
                self.lower_closed,
            )
        }
    }

    /// A finite window inside the interval used for sampling.
    ///
    /// Bounded intervals are shrunk by 1% of their length at each end. A
    /// half-line with finite end `a` becomes `[a + 0.01, a + 100]` (mirrored
    /// for an upper end), so `(0, ∞)` samples four decades. The whole line
    /// becomes `[-100, 100]`.
    pub fn sampling_window(&self) -> (f64, f64) {
        match (self.lower, self.upper) {
            (Some(a), Some(b)) => {
                let pad = 0.01 * (b - a);
                (a + pad, b - pad)
            }
            (Some(a), None) => (a + 0.01, a + 100.0),
            (None, Some(b)) => (b - 100.0, b - 0.01),
            (None, None) => (-100.0, 100.0),
        }
    }

    /// Checks every entry against the interval.
    pub fn check_entries(&self, x: &[f64]) -> Result<()> {
        for (index, &value) in x.iter().enumerate() {
            if !self.contains(value) {
                return Err(Error::DomainViolation {
                    index,
                    value,
                    domain: self.to_string(),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lower_closed { '[' } else { '(' };
        let close = if self.upper_closed { ']' } else { ')' };
        let lo = self.lower.map_or("-inf".to_string(), |v| v.to_string());
        let hi = self.upper.map_or("inf".to_string(), |v| v.to_string());
        write!(f, "{open}{lo}, {hi}{close}")
    }
}
