//! Weight vectors, their admissibility classes and weight algebra.
//!
//! A [`WeightVector`] is homogeneous: either every entry is an exact
//! [`Rational`] or every entry is an `f64`. Exact vectors are what the
//! geometric constructions in [`crate::simple`] consume; float vectors are
//! convenient for evaluation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{lcm_i64, Rational};

/// Admissibility class of a weight vector.
///
/// `W` requires nonnegative entries with a positive sum; `W0` additionally
/// requires a positive first entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightClass {
    W,
    W0,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightEntries {
    Exact(Vec<Rational>),
    Float(Vec<f64>),
}

/// A scalar in either representation, used for scaling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Float(f64),
}

impl Scalar {
    pub fn to_f64(self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64(),
            Scalar::Float(x) => x,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    entries: WeightEntries,
    class: WeightClass,
}

/// Partial sums `Λ_1, …, Λ_n` of a weight vector. `Λ_0 = 0` is implicit.
#[derive(Clone, Debug, PartialEq)]
pub enum PartialSums {
    Exact(Vec<Rational>),
    Float(Vec<f64>),
}

impl PartialSums {
    pub fn len(&self) -> usize {
        match self {
            PartialSums::Exact(v) => v.len(),
            PartialSums::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `Λ_k` with the convention `Λ_0 = 0`.
    pub fn get(&self, k: usize) -> Scalar {
        match self {
            PartialSums::Exact(v) => Scalar::Exact(if k == 0 { Rational::ZERO } else { v[k - 1] }),
            PartialSums::Float(v) => Scalar::Float(if k == 0 { 0.0 } else { v[k - 1] }),
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            PartialSums::Exact(v) => v.iter().map(Rational::to_f64).collect(),
            PartialSums::Float(v) => v.clone(),
        }
    }
}

fn validate_signs<T: PartialOrd + Copy + fmt::Display>(
    entries: &[T],
    zero: T,
    class: WeightClass,
) -> Result<()> {
    if entries.is_empty() {
        return Err(Error::Empty);
    }
    for (index, &v) in entries.iter().enumerate() {
        if v < zero {
            return Err(Error::NegativeWeight {
                index,
                value: v.to_string(),
            });
        }
    }
    if entries.iter().all(|&v| v == zero) {
        return Err(Error::AllZero);
    }
    if class == WeightClass::W0 && entries[0] == zero {
        return Err(Error::FirstWeightZero);
    }
    Ok(())
}

impl WeightVector {
    pub fn new(entries: WeightEntries, class: WeightClass) -> Result<Self> {
        match &entries {
            WeightEntries::Exact(v) => validate_signs(v, Rational::ZERO, class)?,
            WeightEntries::Float(v) => {
                if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
                    return Err(Error::NonFinite(bad.to_string()));
                }
                validate_signs(v, 0.0, class)?
            }
        }
        Ok(WeightVector { entries, class })
    }

    pub fn exact(entries: Vec<Rational>, class: WeightClass) -> Result<Self> {
        Self::new(WeightEntries::Exact(entries), class)
    }

    pub fn float(entries: Vec<f64>, class: WeightClass) -> Result<Self> {
        Self::new(WeightEntries::Float(entries), class)
    }

    /// Exact vector from integers; handy in tests and examples.
    pub fn from_integers(entries: &[i64], class: WeightClass) -> Result<Self> {
        Self::exact(
            entries.iter().map(|&n| Rational::integer(n)).collect(),
            class,
        )
    }

    /// Parses `p/q` or decimal literals into an exact vector.
    pub fn parse_exact<S: AsRef<str>>(items: &[S], class: WeightClass) -> Result<Self> {
        let entries = items
            .iter()
            .map(|s| s.as_ref().parse::<Rational>())
            .collect::<Result<Vec<_>>>()?;
        Self::exact(entries, class)
    }

    /// Parses `p/q` or decimal literals into a float vector.
    pub fn parse_float<S: AsRef<str>>(items: &[S], class: WeightClass) -> Result<Self> {
        let entries = items
            .iter()
            .map(|s| crate::parse::parse_f64(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::float(entries, class)
    }

    pub fn entries(&self) -> &WeightEntries {
        &self.entries
    }

    pub fn class(&self) -> WeightClass {
        self.class
    }

    pub fn len(&self) -> usize {
        match &self.entries {
            WeightEntries::Exact(v) => v.len(),
            WeightEntries::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.entries, WeightEntries::Exact(_))
    }

    pub fn rationals(&self) -> Option<&[Rational]> {
        match &self.entries {
            WeightEntries::Exact(v) => Some(v),
            WeightEntries::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match &self.entries {
            WeightEntries::Exact(v) => v.iter().map(Rational::to_f64).collect(),
            WeightEntries::Float(v) => v.clone(),
        }
    }

    /// Float copy of this vector, keeping the class.
    pub fn to_float(&self) -> WeightVector {
        WeightVector {
            entries: WeightEntries::Float(self.to_f64()),
            class: self.class,
        }
    }

    pub fn partial_sums(&self) -> Result<PartialSums> {
        match &self.entries {
            WeightEntries::Exact(v) => {
                let mut acc = Rational::ZERO;
                let mut out = Vec::with_capacity(v.len());
                for r in v {
                    acc = acc.checked_add(*r)?;
                    out.push(acc);
                }
                Ok(PartialSums::Exact(out))
            }
            WeightEntries::Float(v) => {
                let mut acc = 0.0;
                Ok(PartialSums::Float(
                    v.iter()
                        .map(|x| {
                            acc += x;
                            acc
                        })
                        .collect(),
                ))
            }
        }
    }

    /// First index `k` (0-based) with `λ_k/Λ_k < λ_{k+1}/Λ_{k+1}`, i.e. where the
    /// ratio sequence increases. `None` means the vector lies in `V_n`.
    ///
    /// A vector with `λ_1 = 0` is never in `V_n`; it reports index 0.
    pub fn v_violation(&self) -> Option<usize> {
        match &self.entries {
            WeightEntries::Exact(v) => {
                if v[0].is_zero() {
                    return Some(0);
                }
                // Overflow counts as a violation: membership cannot be certified.
                let mut prev_l = v[0];
                let mut prev_sum = v[0];
                for (k, &l) in v.iter().enumerate().skip(1) {
                    let sum = match prev_sum.checked_add(l) {
                        Ok(s) => s,
                        Err(_) => return Some(k - 1),
                    };
                    // prev_l/prev_sum >= l/sum  <=>  prev_l*sum >= l*prev_sum
                    let lhs = prev_l.checked_mul(sum);
                    let rhs = l.checked_mul(prev_sum);
                    match (lhs, rhs) {
                        (Ok(a), Ok(b)) if a >= b => {}
                        _ => return Some(k - 1),
                    }
                    prev_l = l;
                    prev_sum = sum;
                }
                None
            }
            WeightEntries::Float(v) => {
                if v[0] <= 0.0 {
                    return Some(0);
                }
                let mut prev_l = v[0];
                let mut prev_sum = v[0];
                for (k, &l) in v.iter().enumerate().skip(1) {
                    let sum = prev_sum + l;
                    if prev_l * sum < l * prev_sum {
                        return Some(k - 1);
                    }
                    prev_l = l;
                    prev_sum = sum;
                }
                None
            }
        }
    }

    /// Whether `λ_k/Λ_k` is nonincreasing (class `V_n`). Ties count as
    /// nonincreasing.
    pub fn is_in_v(&self) -> bool {
        self.v_violation().is_none()
    }

    pub fn scale(&self, t: Scalar) -> Result<WeightVector> {
        let positive = match t {
            Scalar::Exact(r) => r.is_positive(),
            Scalar::Float(x) => x > 0.0 && x.is_finite(),
        };
        if !positive {
            let shown = match t {
                Scalar::Exact(r) => r.to_string(),
                Scalar::Float(x) => x.to_string(),
            };
            return Err(Error::NonpositiveScale(shown));
        }
        let entries = match (&self.entries, t) {
            (WeightEntries::Exact(v), Scalar::Exact(r)) => {
                WeightEntries::Exact(v.iter().map(|x| x.checked_mul(r)).collect::<Result<_>>()?)
            }
            (_, t) => {
                let t = t.to_f64();
                WeightEntries::Float(self.to_f64().into_iter().map(|x| x * t).collect())
            }
        };
        WeightVector::new(entries, self.class)
    }

    /// Multiplies an exact vector by the lcm of its denominators, giving an
    /// integer vector that defines the same weighting.
    pub fn clear_denominators(&self) -> Result<WeightVector> {
        let v = self.rationals().ok_or_else(|| {
            Error::InvalidArgument("clear_denominators requires exact weights".into())
        })?;
        let lcm = v.iter().try_fold(1i64, |acc, r| lcm_i64(acc, r.denom()))?;
        self.scale(Scalar::Exact(Rational::integer(lcm)))
    }

    /// Integer entries, when every entry is a nonnegative integer.
    pub fn as_integers(&self) -> Result<Vec<u64>> {
        match &self.entries {
            WeightEntries::Exact(v) => v
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    if r.is_integer() {
                        Ok(r.numer() as u64)
                    } else {
                        Err(Error::NonIntegerWeight(i))
                    }
                })
                .collect(),
            WeightEntries::Float(v) => v
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    if x.fract() == 0.0 && x < u64::MAX as f64 {
                        Ok(x as u64)
                    } else {
                        Err(Error::NonIntegerWeight(i))
                    }
                })
                .collect(),
        }
    }
}

/// Interleaves two equal-length sequences: `(p_1, q_1, …, p_n, q_n)`.
pub fn shuffle<T: Clone>(a: &[T], b: &[T]) -> Result<Vec<T>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .flat_map(|(p, q)| [p.clone(), q.clone()])
        .collect())
}
