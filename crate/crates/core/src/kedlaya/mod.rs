//! The weighted Kedlaya inequality
//!
//! ```text
//! Ar_k( M(x_1..x_k; λ_1..λ_k), λ_k )  ≤  M( (m_1, …, m_n), λ ),   m_k = Ar(x_1..x_k; λ_1..λ_k)
//! ```
//!
//! It holds for symmetric Jensen concave means whenever `λ_k/Λ_k` is
//! nonincreasing, and reverses for Jensen convex ones. The proof telescopes
//! through the step inequalities
//!
//! ```text
//! Λ_{j−1}·M(m_1..m_{j−1}) + λ_j·M(x_1..x_j)  ≤  Λ_j·M(m_1..m_j),   j = 2..n.
//! ```

mod necessity;
mod sweep;

use serde::{Deserialize, Serialize};

pub use necessity::{
    necessity_probe, search_violation, NecessityProbe, ViolationWitness, DEFAULT_STEP,
};
pub use sweep::{sweep, SweepConfig, SweepResult, SweepRow, SweepSummary, SweepWeights};

use crate::concavity::{
    cdm_condition, gini_concavity_condition, qa_concavity_condition, DEFAULT_SAMPLES,
};
use crate::error::{Error, Result};
use crate::means::{Family, MeanHandle};
use crate::weights::{WeightEntries, WeightVector};

/// Default relative tolerance of the verdict.
pub const DEFAULT_TOL: f64 = 1e-9;

/// `M_{a,b}(x) = a·M((x − b)/a) + b`. A negative `a` reverses Kedlaya verdicts.
pub fn affine_conjugate(mean: &MeanHandle, a: f64, b: f64) -> Result<MeanHandle> {
    mean.affine_conjugate(a, b)
}

fn check_lengths(x: &[f64], w: &[f64]) -> Result<()> {
    if x.len() != w.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: w.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::Empty);
    }
    if !(w[0] > 0.0) {
        return Err(Error::FirstWeightZero);
    }
    Ok(())
}

fn means_of(x: &[f64], w: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let (mut m, mut total) = (x[0], w[0]);
    out.push(m);
    for (&xk, &lk) in x.iter().zip(w).skip(1) {
        total += lk;
        // Update form keeps constant inputs exact.
        m += lk * (xk - m) / total;
        out.push(m);
    }
    out
}

/// Weighted arithmetic prefix means `m_1 = x_1, …, m_n`.
pub fn partial_arithmetic_means(x: &[f64], w: &WeightVector) -> Result<Vec<f64>> {
    let wf = w.to_f64();
    check_lengths(x, &wf)?;
    Ok(means_of(x, &wf))
}

/// The two sides of the inequality: the λ-weighted arithmetic mean of the
/// prefix `M`-means, and `M` of the prefix arithmetic means.
pub fn kedlaya_sides(mean: &MeanHandle, x: &[f64], w: &WeightVector) -> Result<(f64, f64)> {
    let wf = w.to_f64();
    check_lengths(x, &wf)?;
    sides(mean, x, &wf)
}

fn sides(mean: &MeanHandle, x: &[f64], w: &[f64]) -> Result<(f64, f64)> {
    mean.domain().check_entries(x)?;
    let prefix = (1..=x.len())
        .map(|k| mean.eval(&x[..k], &w[..k]))
        .collect::<Result<Vec<f64>>>()?;
    let total: f64 = w.iter().sum();
    let lhs = prefix.iter().zip(w).map(|(&p, &l)| l * p).sum::<f64>() / total;
    let rhs = mean.eval(&means_of(x, w), w)?;
    Ok((lhs, rhs))
}

/// The two sides of the `j`-th step inequality (`j` counts from 1, `2 ≤ j ≤ n`):
/// `(Λ_{j−1}·M(m_1..m_{j−1}) + λ_j·M(x_1..x_j), Λ_j·M(m_1..m_j))`.
pub fn step_inequality(
    mean: &MeanHandle,
    x: &[f64],
    w: &WeightVector,
    j: usize,
) -> Result<(f64, f64)> {
    let wf = w.to_f64();
    check_lengths(x, &wf)?;
    if j < 2 || j > x.len() {
        return Err(Error::IndexOutOfRange {
            index: j,
            len: x.len(),
        });
    }
    if let Some(k) = wf[..j].iter().position(|&l| !(l > 0.0)) {
        return Err(Error::NonpositiveWeight(k));
    }
    mean.domain().check_entries(x)?;
    step(mean, x, &wf, &means_of(x, &wf), j)
}

fn step(mean: &MeanHandle, x: &[f64], w: &[f64], m: &[f64], j: usize) -> Result<(f64, f64)> {
    let lam_prev: f64 = w[..j - 1].iter().sum();
    let lam = lam_prev + w[j - 1];
    let lhs =
        lam_prev * mean.eval(&m[..j - 1], &w[..j - 1])? + w[j - 1] * mean.eval(&x[..j], &w[..j])?;
    let rhs = lam * mean.eval(&m[..j], &w[..j])?;
    Ok((lhs, rhs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// `rhs − lhs` exceeds the tolerance.
    Holds,
    /// `lhs − rhs` exceeds the tolerance.
    Reversed,
    /// The sign contradicts what the mean's Jensen class guarantees.
    Violated,
    /// The sides agree within the tolerance.
    Equality,
}

/// Known Jensen behaviour of a mean, which fixes the expected verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum JensenClass {
    Concave,
    Convex,
    /// Both concave and convex: the inequality is an equality for all weights.
    Affine,
    Unknown,
}

impl JensenClass {
    pub fn dual(self) -> JensenClass {
        match self {
            JensenClass::Concave => JensenClass::Convex,
            JensenClass::Convex => JensenClass::Concave,
            c => c,
        }
    }
}

/// Classification from the analytic criteria; nothing is sampled.
pub fn jensen_class(mean: &MeanHandle) -> JensenClass {
    use JensenClass::*;
    match mean.family() {
        Family::Arithmetic => Affine,
        Family::Min => Concave,
        Family::Max => Convex,
        Family::Power(p) if *p == 1.0 => Affine,
        Family::Power(p) if *p < 1.0 => Concave,
        Family::Power(_) => Convex,
        Family::Gini { p, q } => {
            let (lo, hi) = (p.min(*q), p.max(*q));
            if lo == 0.0 && hi == 1.0 {
                Affine
            } else if gini_concavity_condition(*p, *q) {
                Concave
            } else if (lo == 0.0 && hi > 1.0) || (lo == 1.0 && hi == 2.0) {
                Convex
            } else {
                Unknown
            }
        }
        Family::QuasiArithmetic(g) => {
            let pts = crate::concavity::grid(g.domain().sampling_window(), DEFAULT_SAMPLES);
            let affine = pts
                .iter()
                .all(|&t| g.f_second(t).is_some_and(|v| v.abs() <= 1e-12));
            if affine {
                Affine
            } else if qa_concavity_condition(g, DEFAULT_SAMPLES).unwrap_or(false) {
                Concave
            } else {
                Unknown
            }
        }
        Family::HomogeneousDeviation(g) => {
            let f = g.function();
            let domain = mean.domain();
            if cdm_condition(|t| f(t), domain, DEFAULT_SAMPLES)
                || cdm_condition(|t| -f(t), domain, DEFAULT_SAMPLES)
            {
                Concave
            } else {
                Unknown
            }
        }
        Family::CustomDeviation(_) => Unknown,
        Family::Gini21Counterexample => Convex,
        Family::Affine { inner, a, .. } => {
            let c = jensen_class(inner);
            if *a > 0.0 {
                c
            } else {
                c.dual()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportInputs {
    pub mean: String,
    pub x: Vec<f64>,
    pub w: WeightVector,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KedlayaReport {
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`.
    pub gap: f64,
    pub verdict: Verdict,
    /// `rhs_j − lhs_j` of the step inequalities for `j = 2..n`. They sum to
    /// `Λ_n · gap`.
    pub step_gaps: Vec<f64>,
    pub jensen_class: JensenClass,
    pub weights_in_v: bool,
    pub inputs: ReportInputs,
}

/// Sign classification with tolerance `tol·(1 + |rhs|)`, then the check
/// against the Jensen class: a concave mean with `λ ∈ V_n` must not reverse,
/// a convex one must not hold, and an affine one must give equality.
pub fn classify(gap: f64, rhs: f64, tol: f64, class: JensenClass, in_v: bool) -> Verdict {
    let eff = tol * (1.0 + rhs.abs());
    let raw = if gap.abs() <= eff {
        Verdict::Equality
    } else if gap > 0.0 {
        Verdict::Holds
    } else {
        Verdict::Reversed
    };
    let violated = match (class, raw) {
        (JensenClass::Affine, Verdict::Holds | Verdict::Reversed) => true,
        (JensenClass::Concave, Verdict::Reversed) | (JensenClass::Convex, Verdict::Holds) => in_v,
        _ => false,
    };
    if violated {
        Verdict::Violated
    } else {
        raw
    }
}

/// Reduces a weight vector for the inequality: trailing zero weights are
/// dropped, since eliminating them changes neither side. Interior zeros are
/// only admissible inside `V_n`, where they cannot occur once trailing zeros
/// are gone.
fn reduce(w: &[f64]) -> Result<usize> {
    if !(w[0] > 0.0) {
        return Err(Error::FirstWeightZero);
    }
    let len = w.iter().rposition(|&l| l > 0.0).map_or(0, |k| k + 1);
    if let Some(k) = w[..len].iter().position(|&l| l == 0.0) {
        return Err(Error::InteriorZeroWeight(k));
    }
    Ok(len)
}

/// Checks the inequality with a fresh classification of the mean.
pub fn check_kedlaya(
    mean: &MeanHandle,
    x: &[f64],
    w: &WeightVector,
    tol: f64,
) -> Result<KedlayaReport> {
    KedlayaChecker::new(mean.clone(), tol)?.check(x, w)
}

/// A mean with its Jensen class computed once, for repeated checks.
#[derive(Clone, Debug)]
pub struct KedlayaChecker {
    mean: MeanHandle,
    class: JensenClass,
    tol: f64,
}

impl KedlayaChecker {
    pub fn new(mean: MeanHandle, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        let class = jensen_class(&mean);
        Ok(KedlayaChecker { mean, class, tol })
    }

    /// Overrides the analytic classification, e.g. with a sampled verdict.
    pub fn with_class(mut self, class: JensenClass) -> Self {
        self.class = class;
        self
    }

    pub fn mean(&self) -> &MeanHandle {
        &self.mean
    }

    pub fn class(&self) -> JensenClass {
        self.class
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn check(&self, x: &[f64], w: &WeightVector) -> Result<KedlayaReport> {
        let wf = w.to_f64();
        check_lengths(x, &wf)?;
        let in_v = w.is_in_v();
        let len = reduce(&wf)?;
        let (xr, wr) = (&x[..len], &wf[..len]);
        // Dropped entries still have to be admissible.
        self.mean.domain().check_entries(x)?;
        let (lhs, rhs) = sides(&self.mean, xr, wr)?;
        let m = means_of(xr, wr);
        let mut step_gaps = (2..=len)
            .map(|j| step(&self.mean, xr, wr, &m, j).map(|(l, r)| r - l))
            .collect::<Result<Vec<f64>>>()?;
        step_gaps.resize(x.len().saturating_sub(1), 0.0);
        let gap = rhs - lhs;
        Ok(KedlayaReport {
            n: x.len(),
            lhs,
            rhs,
            gap,
            verdict: classify(gap, rhs, self.tol, self.class, in_v),
            step_gaps,
            jensen_class: self.class,
            weights_in_v: in_v,
            inputs: ReportInputs {
                mean: self.mean.id(),
                x: x.to_vec(),
                w: w.clone(),
                tol: self.tol,
            },
        })
    }
}

/// Exact `Λ` ratios compare exactly; float weights by cross-multiplication.
pub(crate) fn last_ratio_nonincreasing(w: &WeightVector, n: usize) -> Result<bool> {
    match w.entries() {
        WeightEntries::Exact(v) => {
            let v = &v[..n];
            let prev = crate::rational::Rational::sum(&v[..n - 1])?;
            let all = prev.checked_add(v[n - 1])?;
            Ok(v[n - 2].checked_mul(all)? >= v[n - 1].checked_mul(prev)?)
        }
        WeightEntries::Float(v) => {
            let prev: f64 = v[..n - 1].iter().sum();
            Ok(v[n - 2] * (prev + v[n - 1]) >= v[n - 1] * prev)
        }
    }
}
