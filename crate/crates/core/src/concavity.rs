//! Jensen concavity and convexity of weighted means.
//!
//! The sampler can only refute: a concave verdict means no midpoint violation
//! of concavity was seen, while convexity was refuted somewhere. The analytic
//! criteria for quasi-arithmetic, Gini and homogeneous deviation means are
//! evaluated on sample grids.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deviation::DeviationSpec;
use crate::deviation::GeneratorSpec;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::means::MeanHandle;
use crate::sampling::{sample_entries, sample_entry, sample_simplex_weights, trial_rng};

/// Default tolerance on the midpoint gap.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default number of grid points for the derivative-based criteria.
pub const DEFAULT_SAMPLES: usize = 257;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Concave,
    Convex,
    Neither,
    /// Both midpoint inequalities held on every trial, as for affine means.
    Inconclusive,
}

impl Verdict {
    /// The verdict for the reflected mean `x ↦ −M(−x)`.
    pub fn dual(self) -> Verdict {
        match self {
            Verdict::Concave => Verdict::Convex,
            Verdict::Convex => Verdict::Concave,
            v => v,
        }
    }
}

/// A pair of points and weights at which one midpoint inequality fails.
///
/// For two-variable functions `x` and `y` hold the two points and `w` is empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub trial: u64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub w: Vec<f64>,
    /// `M((x+y)/2) − (M(x) + M(y))/2`.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcavityVerdict {
    pub verdict: Verdict,
    /// Largest amount by which a midpoint inequality consistent with the
    /// verdict was missed (both sides for `Neither`, the largest `|gap|` for
    /// `Inconclusive`).
    pub worst_violation: f64,
    /// First trial where concavity failed by more than the tolerance.
    pub concavity_witness: Option<Witness>,
    /// First trial where convexity failed by more than the tolerance.
    pub convexity_witness: Option<Witness>,
    pub trials: u64,
}

impl ConcavityVerdict {
    /// The witness that explains the verdict, if any.
    pub fn witness(&self) -> Option<&Witness> {
        match self.verdict {
            Verdict::Concave => self.convexity_witness.as_ref(),
            Verdict::Convex | Verdict::Neither => self.concavity_witness.as_ref(),
            Verdict::Inconclusive => None,
        }
    }
}

fn classify<W>(gaps: &[f64], tol: f64, witness: W) -> Result<ConcavityVerdict>
where
    W: Fn(u64) -> Result<Witness>,
{
    let first_concave_fail = gaps.iter().position(|&g| g < -tol);
    let first_convex_fail = gaps.iter().position(|&g| g > tol);
    let max_neg = gaps.iter().fold(0.0f64, |m, &g| m.max(-g));
    let max_pos = gaps.iter().fold(0.0f64, |m, &g| m.max(g));
    let (verdict, worst) = match (first_concave_fail, first_convex_fail) {
        (None, Some(_)) => (Verdict::Concave, max_neg),
        (Some(_), None) => (Verdict::Convex, max_pos),
        (Some(_), Some(_)) => (Verdict::Neither, max_neg.max(max_pos)),
        (None, None) => (Verdict::Inconclusive, max_neg.max(max_pos)),
    };
    Ok(ConcavityVerdict {
        verdict,
        worst_violation: worst,
        concavity_witness: first_concave_fail.map(|i| witness(i as u64)).transpose()?,
        convexity_witness: first_convex_fail.map(|i| witness(i as u64)).transpose()?,
        trials: gaps.len() as u64,
    })
}

/// Draws the inputs of one mean trial.
fn mean_trial_inputs(
    window: (f64, f64),
    n: usize,
    seed: u64,
    trial: u64,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut rng = trial_rng(seed, trial);
    let x = sample_entries(&mut rng, window, n);
    let y = sample_entries(&mut rng, window, n);
    let w = sample_simplex_weights(&mut rng, n);
    (x, y, w)
}

fn midpoint_gap(mean: &MeanHandle, x: &[f64], y: &[f64], w: &[f64]) -> Result<f64> {
    let mid: Vec<f64> = x.iter().zip(y).map(|(a, b)| 0.5 * (a + b)).collect();
    Ok(mean.eval(&mid, w)? - 0.5 * (mean.eval(x, w)? + mean.eval(y, w)?))
}

/// Samples the midpoint inequality `M((x+y)/2, λ) ≥ (M(x, λ) + M(y, λ))/2`
/// and its reverse on `trials` random triples.
///
/// Entries are drawn from the domain's sampling window (log-uniform on
/// positive windows), weights uniformly from the simplex. Trials run in
/// parallel; trial `k` always sees the same inputs for a given seed.
pub fn sample_jensen_concavity(
    mean: &MeanHandle,
    n: usize,
    trials: u64,
    tol: f64,
    seed: u64,
) -> Result<ConcavityVerdict> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let window = mean.domain().sampling_window();
    let gaps = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (x, y, w) = mean_trial_inputs(window, n, seed, t);
            midpoint_gap(mean, &x, &y, &w)
        })
        .collect::<Result<Vec<f64>>>()?;
    classify(&gaps, tol, |t| {
        let (x, y, w) = mean_trial_inputs(window, n, seed, t);
        let gap = midpoint_gap(mean, &x, &y, &w)?;
        Ok(Witness {
            trial: t,
            x,
            y,
            w,
            gap,
        })
    })
}

/// Samples midpoint concavity of a two-variable function on `window²`.
pub fn sample_midpoint_concavity_2d<F>(
    f: F,
    window: (f64, f64),
    trials: u64,
    tol: f64,
    seed: u64,
) -> Result<ConcavityVerdict>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let points = |t: u64| {
        let mut rng = trial_rng(seed, t);
        let p = [
            sample_entry(&mut rng, window),
            sample_entry(&mut rng, window),
        ];
        let q = [
            sample_entry(&mut rng, window),
            sample_entry(&mut rng, window),
        ];
        (p, q)
    };
    let gap = |p: [f64; 2], q: [f64; 2]| {
        f(0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])) - 0.5 * (f(p[0], p[1]) + f(q[0], q[1]))
    };
    let gaps: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (p, q) = points(t);
            gap(p, q)
        })
        .collect();
    if let Some(bad) = gaps.iter().position(|g| !g.is_finite()) {
        return Err(Error::NonFinite(format!("midpoint gap at trial {bad}")));
    }
    classify(&gaps, tol, |t| {
        let (p, q) = points(t);
        Ok(Witness {
            trial: t,
            x: p.to_vec(),
            y: q.to_vec(),
            w: Vec::new(),
            gap: gap(p, q),
        })
    })
}

/// `E*(x, t) = −E(x, t) / ∂₂E(t, t)`.
#[derive(Clone, Debug)]
pub struct EStar {
    spec: DeviationSpec,
}

impl EStar {
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        let d = self.spec.d2(t, t).expect("checked on construction");
        -self.spec.eval(x, t) / d
    }

    pub fn domain(&self) -> Interval {
        self.spec.domain()
    }

    /// Midpoint concavity of `E*` sampled on the domain's window.
    pub fn sample_concavity(&self, trials: u64, tol: f64, seed: u64) -> Result<ConcavityVerdict> {
        sample_midpoint_concavity_2d(
            |x, t| self.eval(x, t),
            self.domain().sampling_window(),
            trials,
            tol,
            seed,
        )
    }
}

/// Builds `E*` after checking `|∂₂E(t, t)| ≥ 1e-12` on 32 grid points.
pub fn estar_transform(spec: &DeviationSpec) -> Result<EStar> {
    if !spec.has_d2() {
        return Err(Error::MissingDerivative(spec.label().to_string()));
    }
    for t in grid(spec.domain().sampling_window(), 32) {
        let d = spec.d2(t, t).expect("present");
        if !(d.abs() >= 1e-12) {
            return Err(Error::VanishingDerivative(t));
        }
    }
    Ok(EStar { spec: spec.clone() })
}

/// `n` points spanning the window: geometric on positive windows, linear otherwise.
pub fn grid((a, b): (f64, f64), n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (a + b)];
    }
    let step = |k: usize| k as f64 / (n - 1) as f64;
    if a > 0.0 {
        let (la, lb) = (a.ln(), b.ln());
        (0..n).map(|k| (la + step(k) * (lb - la)).exp()).collect()
    } else {
        (0..n).map(|k| a + step(k) * (b - a)).collect()
    }
}

/// Whether `f″ ≡ 0`, or `f″` never vanishes and `f′/f″` is negative and
/// midpoint convex, on `samples` grid points and their pairwise midpoints.
///
/// A second derivative of both signs is reported as an error since neither
/// alternative can then hold.
pub fn qa_concavity_condition(gen: &GeneratorSpec, samples: usize) -> Result<bool> {
    let missing = || Error::MissingDerivative(gen.label().to_string());
    let fp = |x: f64| gen.f_prime(x).ok_or_else(missing);
    let fs = |x: f64| gen.f_second(x).ok_or_else(missing);
    let pts = grid(gen.domain().sampling_window(), samples.max(3));
    let seconds = pts.iter().map(|&x| fs(x)).collect::<Result<Vec<f64>>>()?;
    for (&x, &d1) in pts
        .iter()
        .zip(&pts.iter().map(|&x| fp(x)).collect::<Result<Vec<f64>>>()?)
    {
        if d1 == 0.0 {
            return Err(Error::VanishingDerivative(x));
        }
    }
    let zero = |v: f64| v.abs() <= 1e-12;
    if seconds.iter().all(|&v| zero(v)) {
        return Ok(true);
    }
    if seconds.iter().any(|&v| v > 1e-12) && seconds.iter().any(|&v| v < -1e-12) {
        return Err(Error::MixedSignSecondDerivative);
    }
    if seconds.iter().any(|&v| zero(v)) {
        return Ok(false);
    }
    let ratio = |x: f64| -> Result<f64> { Ok(fp(x)? / fs(x)?) };
    let r = pts
        .iter()
        .map(|&x| ratio(x))
        .collect::<Result<Vec<f64>>>()?;
    if r.iter().any(|&v| !(v < 0.0)) {
        return Ok(false);
    }
    for i in 0..pts.len() {
        for k in i + 1..pts.len() {
            let mid = ratio(0.5 * (pts[i] + pts[k]))?;
            let chord = 0.5 * (r[i] + r[k]);
            if mid > chord + 1e-9 * (r[i].abs() + r[k].abs()) + 1e-12 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `min(p, q) ≤ 0 ≤ max(p, q) ≤ 1`.
pub fn gini_concavity_condition(p: f64, q: f64) -> bool {
    p.min(q) <= 0.0 && 0.0 <= p.max(q) && p.max(q) <= 1.0
}

/// Sampled check that `f` is strictly increasing and midpoint concave on the
/// domain's window, with `|f(1)| ≤ 1e-12`.
pub fn cdm_condition<F: Fn(f64) -> f64>(f: F, domain: Interval, samples: usize) -> bool {
    if !(f(1.0).abs() <= 1e-12) || !domain.is_subset_of(&Interval::POSITIVE) {
        return false;
    }
    let pts = grid(domain.sampling_window(), samples.max(3));
    let vals: Vec<f64> = pts.iter().map(|&t| f(t)).collect();
    if vals.iter().any(|v| !v.is_finite()) || vals.windows(2).any(|p| !(p[1] > p[0])) {
        return false;
    }
    for i in 0..pts.len() {
        for k in i + 1..pts.len() {
            let mid = f(0.5 * (pts[i] + pts[k]));
            let chord = 0.5 * (vals[i] + vals[k]);
            if mid < chord - 1e-9 * (vals[i].abs() + vals[k].abs()) - 1e-12 {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deviation::HomogeneousGenerator;

    fn m(id: &str) -> MeanHandle {
        id.parse().unwrap()
    }

    #[test]
    fn sampler_examples() {
        let a = sample_jensen_concavity(&m("arithmetic"), 3, 2000, DEFAULT_TOL, 1).unwrap();
        assert_eq!(a.verdict, Verdict::Inconclusive);
        assert!(a.witness().is_none());
        let g = sample_jensen_concavity(&m("power:0"), 3, 10_000, DEFAULT_TOL, 42).unwrap();
        assert_eq!(g.verdict, Verdict::Concave);
        assert!(g.worst_violation <= DEFAULT_TOL);
        let c = sample_jensen_concavity(&m("gini:2:1"), 2, 10_000, DEFAULT_TOL, 42).unwrap();
        assert_eq!(c.verdict, Verdict::Convex);
        let wit = c.witness().unwrap();
        assert!(wit.gap < -DEFAULT_TOL);
        // The witness replays to the recorded gap.
        let replay = midpoint_gap(&m("gini:2:1"), &wit.x, &wit.y, &wit.w).unwrap();
        assert_eq!(replay, wit.gap);
    }

    #[test]
    fn sampler_is_deterministic() {
        let a = sample_jensen_concavity(&m("power:2"), 4, 500, DEFAULT_TOL, 9).unwrap();
        let b = sample_jensen_concavity(&m("power:2"), 4, 500, DEFAULT_TOL, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reflection_gives_dual_verdicts() {
        for id in ["power:0", "gini:2:1", "arithmetic", "power:3", "qa:exp"] {
            let mean = m(id);
            let refl = mean.reflection().unwrap();
            let a = sample_jensen_concavity(&mean, 3, 3000, DEFAULT_TOL, 5).unwrap();
            let b = sample_jensen_concavity(&refl, 3, 3000, DEFAULT_TOL, 5).unwrap();
            assert_eq!(a.verdict.dual(), b.verdict, "{id}");
        }
    }

    #[test]
    fn estar_examples() {
        let lin = DeviationSpec::new(
            "linear",
            Interval::REAL,
            |x, y| x - y,
            Some(std::sync::Arc::new(|_, _| -1.0)),
        )
        .unwrap();
        let e = estar_transform(&lin).unwrap();
        assert_eq!(e.eval(3.0, 1.0), 2.0);
        let log = DeviationSpec::from_generator(&GeneratorSpec::log()).unwrap();
        let e = estar_transform(&log).unwrap();
        let (x, t) = (3.0f64, 2.0f64);
        assert!((e.eval(x, t) - t * (x.ln() - t.ln())).abs() < 1e-15);
        let sq = DeviationSpec::from_generator(&GeneratorSpec::power(2.0).unwrap()).unwrap();
        let e = estar_transform(&sq).unwrap();
        assert!((e.eval(x, t) - (x * x - t * t) / (2.0 * t)).abs() < 1e-15);

        let no_d2 = DeviationSpec::new("linear", Interval::REAL, |x, y| x - y, None).unwrap();
        assert!(matches!(
            estar_transform(&no_d2),
            Err(Error::MissingDerivative(_))
        ));
        let flat = DeviationSpec::new(
            "flat",
            Interval::REAL,
            |x, y| x - y,
            Some(std::sync::Arc::new(|_, _| 0.0)),
        )
        .unwrap();
        assert!(matches!(
            estar_transform(&flat),
            Err(Error::VanishingDerivative(_))
        ));
    }

    #[test]
    fn qa_condition_examples() {
        assert!(qa_concavity_condition(&GeneratorSpec::identity(), DEFAULT_SAMPLES).unwrap());
        assert!(qa_concavity_condition(&GeneratorSpec::log(), DEFAULT_SAMPLES).unwrap());
        assert!(
            !qa_concavity_condition(&GeneratorSpec::power(2.0).unwrap(), DEFAULT_SAMPLES).unwrap()
        );
        assert!(
            qa_concavity_condition(&GeneratorSpec::power(0.5).unwrap(), DEFAULT_SAMPLES).unwrap()
        );
        assert!(!qa_concavity_condition(&GeneratorSpec::exp(), DEFAULT_SAMPLES).unwrap());
        let sinh = GeneratorSpec::new(
            "sinh",
            Interval::open(-3.0, 3.0).unwrap(),
            std::sync::Arc::new(f64::sinh),
            std::sync::Arc::new(f64::asinh),
            Some(std::sync::Arc::new(f64::cosh)),
            Some(std::sync::Arc::new(f64::sinh)),
        )
        .unwrap();
        assert_eq!(
            qa_concavity_condition(&sinh, DEFAULT_SAMPLES),
            Err(Error::MixedSignSecondDerivative)
        );
    }

    #[test]
    fn estar_sampling_agrees_with_qa_condition() {
        for gen in [
            GeneratorSpec::log(),
            GeneratorSpec::identity(),
            GeneratorSpec::power(2.0).unwrap(),
            GeneratorSpec::power(0.5).unwrap(),
        ] {
            let cond = qa_concavity_condition(&gen, DEFAULT_SAMPLES).unwrap();
            let estar = estar_transform(&DeviationSpec::from_generator(&gen).unwrap()).unwrap();
            let v = estar
                .sample_concavity(10_000, DEFAULT_TOL, 3)
                .unwrap()
                .verdict;
            let sampled = matches!(v, Verdict::Concave | Verdict::Inconclusive);
            assert_eq!(cond, sampled, "{} gave {v:?}", gen.label());
        }
    }

    #[test]
    fn gini_condition_examples() {
        assert!(gini_concavity_condition(1.0, 0.0));
        assert!(!gini_concavity_condition(2.0, 1.0));
        assert!(gini_concavity_condition(0.0, 0.0));
        assert!(gini_concavity_condition(-1.0, 0.5));
        assert!(!gini_concavity_condition(-1.0, -0.5));
        assert!(!gini_concavity_condition(0.5, 0.5));
    }

    #[test]
    fn cdm_examples() {
        assert!(cdm_condition(f64::ln, Interval::POSITIVE, DEFAULT_SAMPLES));
        assert!(cdm_condition(
            |t| t - 1.0,
            Interval::POSITIVE,
            DEFAULT_SAMPLES
        ));
        assert!(!cdm_condition(
            |t| t * t - 1.0,
            Interval::POSITIVE,
            DEFAULT_SAMPLES
        ));
        assert!(!cdm_condition(
            |t| 1.0 / t - 1.0,
            Interval::POSITIVE,
            DEFAULT_SAMPLES
        ));
        assert!(!cdm_condition(|t| t, Interval::POSITIVE, DEFAULT_SAMPLES));
        let sqrt = HomogeneousGenerator::shifted_power(0.5).unwrap();
        assert!(cdm_condition(
            |t| sqrt.eval(t),
            Interval::POSITIVE,
            DEFAULT_SAMPLES
        ));
    }
}
