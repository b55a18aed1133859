//! Deviation means and the closed-form families built on top of them.
//!
//! A weighted deviation mean of `x` with weights `λ` is the unique root `y` of
//! `Σ λ_i E(x_i, y) = 0`. Deviations here follow the "decreasing in the second
//! variable" convention: `sign E(x, t) = sign(x − t)`, so the weighted sum is
//! strictly decreasing in `y` and bisection on `[min x, max x]` is well posed.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::interval::Interval;

/// Default relative bracket tolerance of the bisection solver.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Iteration cap of the bisection solver.
pub const MAX_ITERATIONS: usize = 200;
const VALIDATION_SAMPLES: usize = 32;

pub type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// `n` Chebyshev nodes mapped onto `[a, b]`, in increasing order.
pub fn chebyshev_points(a: f64, b: f64, n: usize) -> Vec<f64> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (0..n)
        .rev()
        .map(|k| mid + half * ((2 * k + 1) as f64 * PI / (2 * n) as f64).cos())
        .collect()
}

/// Entries and weights with zero-weight entries removed.
#[derive(Debug, Clone)]
pub(crate) struct Support {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
    pub min: f64,
    pub max: f64,
}

impl Support {
    pub fn constant(&self) -> Option<f64> {
        (self.min == self.max).then_some(self.min)
    }

    pub fn total_weight(&self) -> f64 {
        self.w.iter().sum()
    }
}

/// Validates lengths, weight signs and the domain, then drops zero weights.
pub(crate) fn support(x: &[f64], w: &[f64], domain: &Interval) -> Result<Support> {
    if x.len() != w.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: w.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::Empty);
    }
    for (index, &v) in w.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite(v.to_string()));
        }
        if v < 0.0 {
            return Err(Error::NegativeWeight {
                index,
                value: v.to_string(),
            });
        }
    }
    domain.check_entries(x)?;
    let (xs, ws): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(w)
        .filter(|(_, &l)| l > 0.0)
        .map(|(&a, &b)| (a, b))
        .unzip();
    if xs.is_empty() {
        return Err(Error::AllZero);
    }
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Support {
        x: xs,
        w: ws,
        min,
        max,
    })
}

/// Bisection for a continuous, strictly decreasing `g` with `g(lo) ≥ 0 ≥ g(hi)`.
///
/// Stops when the bracket is narrower than `tol·(1 + |y|)`.
pub fn bisect_decreasing<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let (mut lo, mut hi) = (lo, hi);
    let (g_lo, g_hi) = (g(lo), g(hi));
    if g_lo.is_nan() || g_hi.is_nan() {
        return Err(Error::SolverFailure(
            "deviation sum is NaN at a bracket endpoint".into(),
        ));
    }
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if g_lo < 0.0 || g_hi > 0.0 {
        return Err(Error::SolverFailure(format!(
            "no sign change on [{lo}, {hi}]: g(lo) = {g_lo}, g(hi) = {g_hi}"
        )));
    }
    for _ in 0..MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo < tol * (1.0 + mid.abs()) || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let gm = g(mid);
        if gm.is_nan() {
            return Err(Error::SolverFailure(format!(
                "deviation sum is NaN at {mid}"
            )));
        }
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::MaxIterations(MAX_ITERATIONS))
}

/// A deviation function `E(x, y)` with an optional `∂₂E`.
#[derive(Clone)]
pub struct DeviationSpec {
    e: Fn2,
    d2: Option<Fn2>,
    domain: Interval,
    label: String,
}

impl fmt::Debug for DeviationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DeviationSpec")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("has_d2", &self.d2.is_some())
            .finish()
    }
}

impl DeviationSpec {
    /// Builds and validates a deviation on 32 Chebyshev points of the domain's
    /// sampling window: `E(x, x) = 0`, `E(x, ·)` nonincreasing, and
    /// `sign E(x, t) = sign(x − t)`. Together with the sign condition this
    /// is strict decrease up to float resolution.
    pub fn new(
        label: impl Into<String>,
        domain: Interval,
        e: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        d2: Option<Fn2>,
    ) -> Result<Self> {
        let spec = DeviationSpec {
            e: Arc::new(e),
            d2,
            domain,
            label: label.into(),
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let (a, b) = self.domain.sampling_window();
        let pts = chebyshev_points(a, b, VALIDATION_SAMPLES);
        let bad = |msg: String| Err(Error::InvalidDeviation(format!("{}: {msg}", self.label)));
        for &x in &pts {
            let diag = (self.e)(x, x);
            if !(diag.abs() <= 1e-12) {
                return bad(format!("E({x}, {x}) = {diag} is not zero"));
            }
            let mut prev: Option<f64> = None;
            for &t in &pts {
                let v = (self.e)(x, t);
                if !v.is_finite() {
                    return bad(format!("E({x}, {t}) is not finite"));
                }
                let expected = (x - t).signum();
                if x != t && v.signum() != expected {
                    return bad(format!(
                        "sign of E({x}, {t}) = {v} differs from sign(x - t)"
                    ));
                }
                // Ties are tolerated: with wide windows one term can absorb the
                // other, e.g. e^x − e^y for y far below x.
                if let Some(p) = prev {
                    if v > p {
                        return bad(format!("E({x}, ·) increases near {t}"));
                    }
                }
                prev = Some(v);
            }
        }
        Ok(())
    }

    /// `E(x, y) = f(x) − f(y)` oriented so the result is decreasing in `y`.
    pub fn from_generator(gen: &GeneratorSpec) -> Result<Self> {
        let f = gen.f.clone();
        let sign = if gen.increasing { 1.0 } else { -1.0 };
        let d2 = gen
            .f_prime
            .clone()
            .map(|fp| -> Fn2 { Arc::new(move |_x, y| -sign * fp(y)) });
        DeviationSpec::new(
            format!("qa-deviation:{}", gen.label),
            gen.domain,
            move |x, y| sign * (f(x) - f(y)),
            d2,
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.e)(x, y)
    }

    /// `∂₂E(x, y)` if the deviation carries it.
    pub fn d2(&self, x: f64, y: f64) -> Option<f64> {
        self.d2.as_ref().map(|d| d(x, y))
    }

    pub fn has_d2(&self) -> bool {
        self.d2.is_some()
    }
}

/// Root of `Σ λ_i E(x_i, y) = 0` by bisection on `[min x, max x]`.
pub fn solve_deviation_mean(spec: &DeviationSpec, x: &[f64], w: &[f64], tol: f64) -> Result<f64> {
    let s = support(x, w, &spec.domain)?;
    solve_on_support(&|a, y| spec.eval(a, y), &s, tol)
}

pub(crate) fn solve_on_support(e: &dyn Fn(f64, f64) -> f64, s: &Support, tol: f64) -> Result<f64> {
    if let Some(c) = s.constant() {
        return Ok(c);
    }
    let g = |y: f64| {
        s.x.iter()
            .zip(&s.w)
            .map(|(&xi, &li)| li * e(xi, y))
            .sum::<f64>()
    };
    bisect_decreasing(g, s.min, s.max, tol)
}

/// A generator `f` of a quasi-arithmetic mean together with its inverse and
/// optional first and second derivatives.
#[derive(Clone)]
pub struct GeneratorSpec {
    label: String,
    f: Fn1,
    f_inverse: Fn1,
    f_prime: Option<Fn1>,
    f_second: Option<Fn1>,
    domain: Interval,
    increasing: bool,
}

impl fmt::Debug for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratorSpec")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("increasing", &self.increasing)
            .finish()
    }
}

impl GeneratorSpec {
    /// Builds and validates a generator: strictly monotone on the sampling
    /// window and `f⁻¹(f(x)) ≈ x` to `1e-10·(1 + |x|)`.
    pub fn new(
        label: impl Into<String>,
        domain: Interval,
        f: Fn1,
        f_inverse: Fn1,
        f_prime: Option<Fn1>,
        f_second: Option<Fn1>,
    ) -> Result<Self> {
        let label = label.into();
        let (a, b) = domain.sampling_window();
        let pts = chebyshev_points(a, b, VALIDATION_SAMPLES);
        let values: Vec<f64> = pts.iter().map(|&x| f(x)).collect();
        let bad = |msg: String| Err(Error::InvalidGenerator(format!("{label}: {msg}")));
        if values.iter().any(|v| !v.is_finite()) {
            return bad("f is not finite on the domain".into());
        }
        let increasing = values[1] > values[0];
        let monotone = values
            .windows(2)
            .all(|p| if increasing { p[1] > p[0] } else { p[1] < p[0] });
        if !monotone {
            return bad("f is not strictly monotone".into());
        }
        for (&x, &fx) in pts.iter().zip(&values) {
            let back = f_inverse(fx);
            if !((back - x).abs() <= 1e-10 * (1.0 + x.abs())) {
                return bad(format!("f_inverse(f({x})) = {back}"));
            }
        }
        Ok(GeneratorSpec {
            label,
            f,
            f_inverse,
            f_prime,
            f_second,
            domain,
            increasing,
        })
    }

    pub fn identity() -> Self {
        GeneratorSpec::new(
            "identity",
            Interval::REAL,
            Arc::new(|x| x),
            Arc::new(|y| y),
            Some(Arc::new(|_| 1.0)),
            Some(Arc::new(|_| 0.0)),
        )
        .expect("identity generator is valid")
    }

    pub fn log() -> Self {
        GeneratorSpec::new(
            "log",
            Interval::POSITIVE,
            Arc::new(f64::ln),
            Arc::new(f64::exp),
            Some(Arc::new(|x| 1.0 / x)),
            Some(Arc::new(|x| -1.0 / (x * x))),
        )
        .expect("log generator is valid")
    }

    pub fn exp() -> Self {
        GeneratorSpec::new(
            "exp",
            Interval::REAL,
            Arc::new(f64::exp),
            Arc::new(f64::ln),
            Some(Arc::new(f64::exp)),
            Some(Arc::new(f64::exp)),
        )
        .expect("exp generator is valid")
    }

    /// `x ↦ x^p` on `(0, ∞)`; `p = 0` gives the logarithm.
    pub fn power(p: f64) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::InvalidGenerator(format!("power exponent {p}")));
        }
        if p == 0.0 {
            return Ok(Self::log());
        }
        GeneratorSpec::new(
            format!("pow:{p}"),
            Interval::POSITIVE,
            Arc::new(move |x| x.powf(p)),
            Arc::new(move |y| y.powf(1.0 / p)),
            Some(Arc::new(move |x| p * x.powf(p - 1.0))),
            Some(Arc::new(move |x| p * (p - 1.0) * x.powf(p - 2.0))),
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn is_increasing(&self) -> bool {
        self.increasing
    }

    pub fn f(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn f_inverse(&self, y: f64) -> f64 {
        (self.f_inverse)(y)
    }

    pub fn f_prime(&self, x: f64) -> Option<f64> {
        self.f_prime.as_ref().map(|d| d(x))
    }

    pub fn f_second(&self, x: f64) -> Option<f64> {
        self.f_second.as_ref().map(|d| d(x))
    }
}

/// `f⁻¹(Σ λ_i f(x_i) / Σ λ_i)`.
pub fn quasi_arithmetic(gen: &GeneratorSpec, x: &[f64], w: &[f64]) -> Result<f64> {
    let s = support(x, w, &gen.domain)?;
    quasi_arithmetic_on(gen, &s)
}

pub(crate) fn quasi_arithmetic_on(gen: &GeneratorSpec, s: &Support) -> Result<f64> {
    if let Some(c) = s.constant() {
        return Ok(c);
    }
    let total = s.total_weight();
    let avg =
        s.x.iter()
            .zip(&s.w)
            .map(|(&a, &l)| l * gen.f(a))
            .sum::<f64>()
            / total;
    let y = gen.f_inverse(avg);
    if !y.is_finite() || !gen.domain.contains(y) {
        return Err(Error::InverseOutOfRange {
            value: y,
            domain: gen.domain.to_string(),
        });
    }
    Ok(y.clamp(s.min, s.max))
}

/// `ln Σ λ_i x_i^p` computed with the log-sum-exp shift.
fn log_power_sum(s: &Support, p: f64) -> f64 {
    let terms: Vec<f64> =
        s.x.iter()
            .zip(&s.w)
            .map(|(&a, &l)| l.ln() + p * a.ln())
            .collect();
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// The weighted Gini mean `G_{p,q}` on positive entries.
///
/// The branch is chosen by exact equality of `p` and `q`.
pub fn gini(p: f64, q: f64, x: &[f64], w: &[f64]) -> Result<f64> {
    let s = support(x, w, &Interval::POSITIVE)?;
    gini_on(p, q, &s)
}

pub(crate) fn gini_on(p: f64, q: f64, s: &Support) -> Result<f64> {
    if !p.is_finite() || !q.is_finite() {
        return Err(Error::InvalidMean(format!("gini parameters ({p}, {q})")));
    }
    if let Some(c) = s.constant() {
        return Ok(c);
    }
    let y = if p != q {
        ((log_power_sum(s, p) - log_power_sum(s, q)) / (p - q)).exp()
    } else {
        // Weighted average of ln x with weights λ_i x_i^p.
        let logs: Vec<f64> =
            s.x.iter()
                .zip(&s.w)
                .map(|(&a, &l)| l.ln() + p * a.ln())
                .collect();
        let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (num, den) = logs
            .iter()
            .zip(&s.x)
            .fold((0.0, 0.0), |(num, den), (&t, &a)| {
                let c = (t - m).exp();
                (num + c * a.ln(), den + c)
            });
        (num / den).exp()
    };
    Ok(y.clamp(s.min, s.max))
}

/// The weighted power mean `P_p` on positive entries; `p = 0` is geometric.
pub fn power_mean(p: f64, x: &[f64], w: &[f64]) -> Result<f64> {
    let s = support(x, w, &Interval::POSITIVE)?;
    power_mean_on(p, &s)
}

pub(crate) fn power_mean_on(p: f64, s: &Support) -> Result<f64> {
    if !p.is_finite() {
        return Err(Error::InvalidMean(format!("power exponent {p}")));
    }
    if let Some(c) = s.constant() {
        return Ok(c);
    }
    let total = s.total_weight();
    let y = if p == 0.0 {
        (s.x.iter().zip(&s.w).map(|(&a, &l)| l * a.ln()).sum::<f64>() / total).exp()
    } else {
        // Factor out the entry that keeps every ratio power at most one.
        let pivot = if p > 0.0 { s.max } else { s.min };
        let avg =
            s.x.iter()
                .zip(&s.w)
                .map(|(&a, &l)| l * (a / pivot).powf(p))
                .sum::<f64>()
                / total;
        pivot * avg.powf(1.0 / p)
    };
    Ok(y.clamp(s.min, s.max))
}

/// Generator `f` of a homogeneous deviation mean, `E(x, y) = f(x/y)`.
#[derive(Clone)]
pub struct HomogeneousGenerator {
    label: String,
    f: Fn1,
}

impl fmt::Debug for HomogeneousGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HomogeneousGenerator")
            .field("label", &self.label)
            .finish()
    }
}

impl HomogeneousGenerator {
    /// Requires `|f(1)| ≤ 1e-12`.
    pub fn new(label: impl Into<String>, f: Fn1) -> Result<Self> {
        let label = label.into();
        let at_one = f(1.0);
        if !(at_one.abs() <= 1e-12) {
            return Err(Error::InvalidGenerator(format!("{label}: f(1) = {at_one}")));
        }
        Ok(HomogeneousGenerator { label, f })
    }

    /// `t ↦ t^p − 1`, or `ln t` for `p = 0`.
    pub fn shifted_power(p: f64) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::InvalidGenerator(format!(
                "shifted power exponent {p}"
            )));
        }
        if p == 0.0 {
            return Self::log();
        }
        Self::new(
            format!("shifted-power:{p}"),
            Arc::new(move |t: f64| t.powf(p) - 1.0),
        )
    }

    pub fn log() -> Result<Self> {
        Self::new("log", Arc::new(f64::ln))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn function(&self) -> Fn1 {
        self.f.clone()
    }
}

/// Root of `Σ λ_i f(x_i / y) = 0` on `[min x, max x]`.
///
/// Accepts increasing or decreasing `f`; the orientation is read off the sign of
/// the sum at the left endpoint.
pub fn homogeneous_deviation(
    gen: &HomogeneousGenerator,
    x: &[f64],
    w: &[f64],
    tol: f64,
) -> Result<f64> {
    let s = support(x, w, &Interval::POSITIVE)?;
    homogeneous_deviation_on(gen, &s, tol)
}

pub(crate) fn homogeneous_deviation_on(
    gen: &HomogeneousGenerator,
    s: &Support,
    tol: f64,
) -> Result<f64> {
    if let Some(c) = s.constant() {
        return Ok(c);
    }
    let g = |y: f64| {
        s.x.iter()
            .zip(&s.w)
            .map(|(&a, &l)| l * gen.eval(a / y))
            .sum::<f64>()
    };
    let sign = if g(s.min) < 0.0 { -1.0 } else { 1.0 };
    bisect_decreasing(|y| sign * g(y), s.min, s.max, tol)
}

/// `Σ λ_i x_i² / Σ λ_i x_i` on nonnegative entries, and `0` when the
/// denominator vanishes.
pub fn gini21_counterexample(x: &[f64], w: &[f64]) -> Result<f64> {
    if x.len() != w.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: w.len(),
        });
    }
    Interval::NONNEGATIVE.check_entries(x)?;
    let den: f64 = x.iter().zip(w).map(|(&a, &l)| l * a).sum();
    if den == 0.0 {
        return Ok(0.0);
    }
    let num: f64 = x.iter().zip(w).map(|(&a, &l)| l * a * a).sum();
    Ok(num / den)
}
