//! Necessity of the ratio condition.
//!
//! If a homogeneous mean with `M((0,…,0,1)) = 1` has `μ(t) = M((0,…,0,t,1), λ)`
//! decreasing at `t = 0`, then the reversed inequality forces
//! `λ_{n−1}/Λ_{n−1} ≥ λ_n/Λ_n`. Expanding the reversed inequality at
//! `x = (0,…,0,t,1)` to first order in `t` gives exactly this comparison,
//! which is also where [`search_violation`] looks first.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{last_ratio_nonincreasing, KedlayaChecker, KedlayaReport, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::means::{Family, MeanHandle};
use crate::sampling::{sample_entries, trial_rng};
use crate::weights::{WeightClass, WeightVector};

/// Default finite-difference step for [`necessity_probe`].
pub const DEFAULT_STEP: f64 = 1e-4;

/// Tolerance on the normalisation `M((0,…,0,1)) = 1`.
const NORMALISATION_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NecessityProbe {
    pub n: usize,
    /// Richardson-extrapolated forward difference of `μ` at 0.
    pub mu_prime_0: f64,
    /// Closed-form `μ′(0)` when the mean has one (`−λ_{n−1}/λ_n` for `Σλx²/Σλx`).
    pub analytic_mu_prime_0: Option<f64>,
    /// `λ_{n−1}/Λ_{n−1} ≥ λ_n/Λ_n`.
    pub lambda_condition: bool,
    /// Whether `M((0,…,0,1)) = 1` holds for both `λ_1..λ_{n−1}` and `λ_1..λ_n`,
    /// so that the necessity argument applies at all.
    pub applicable: bool,
    /// Whether the reversed inequality was asserted by the caller.
    pub reversed_asserted: bool,
    /// False exactly when the reversed inequality is asserted, the probe is
    /// applicable, `μ′(0) < 0`, and the ratio condition fails.
    pub consistent: bool,
}

fn unit_tail(n: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    x[n - 1] = 1.0;
    x
}

/// Probes `μ(t) = M((0,…,0,t,1), λ_1..λ_n)` at `t = 0`.
///
/// The derivative estimate is `2·D(h/2) − D(h)` with `D(h) = (μ(h) − μ(0))/h`,
/// which cancels the first-order error of the one-sided difference.
pub fn necessity_probe(
    mean: &MeanHandle,
    w: &WeightVector,
    n: usize,
    h: f64,
    reversed_asserted: bool,
) -> Result<NecessityProbe> {
    if n < 2 || n > w.len() {
        return Err(Error::IndexOutOfRange {
            index: n,
            len: w.len(),
        });
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "step must be positive, got {h}"
        )));
    }
    let lam = &w.to_f64()[..n];
    let mu = |t: f64| -> Result<f64> {
        let mut x = unit_tail(n);
        x[n - 2] = t;
        mean.eval(&x, lam)
    };
    let mu0 = mu(0.0)?;
    let d = |s: f64| -> Result<f64> { Ok((mu(s)? - mu0) / s) };
    let mu_prime_0 = 2.0 * d(h / 2.0)? - d(h)?;
    let shorter = mean.eval(&unit_tail(n - 1), &lam[..n - 1]);
    let applicable = (mu0 - 1.0).abs() <= NORMALISATION_TOL
        && shorter.is_ok_and(|v| (v - 1.0).abs() <= NORMALISATION_TOL)
        && mu_prime_0.is_finite();
    let analytic_mu_prime_0 = match mean.family() {
        Family::Gini21Counterexample if lam[n - 1] > 0.0 => Some(-lam[n - 2] / lam[n - 1]),
        _ => None,
    };
    let lambda_condition = last_ratio_nonincreasing(w, n)?;
    let consistent = !(reversed_asserted && applicable && mu_prime_0 < 0.0 && !lambda_condition);
    Ok(NecessityProbe {
        n,
        mu_prime_0,
        analytic_mu_prime_0,
        lambda_condition,
        applicable,
        reversed_asserted,
        consistent,
    })
}

/// An input at which the reversed inequality fails, i.e. `rhs − lhs`
/// exceeds the verdict tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationWitness {
    /// Number of candidates evaluated, including the witness.
    pub evaluations: u64,
    pub x: Vec<f64>,
    pub report: KedlayaReport,
}

/// Random candidates evaluated per parallel batch.
const BATCH: u64 = 256;

/// Looks for a refutation of the reversed inequality for `λ ∉ V_n`.
///
/// Candidates are first `x = (0,…,0,t,1)` with `t = 2^{−k}`, `k = 0..=40`,
/// then random vectors from the mean's sampling window, where entries at a
/// closed lower bound are hit with probability ¼. At most `budget` candidates
/// are evaluated, and the same seed always returns the same witness.
pub fn search_violation(
    mean: &MeanHandle,
    w: &WeightVector,
    budget: u64,
    seed: u64,
) -> Result<Option<ViolationWitness>> {
    if w.is_in_v() {
        return Err(Error::WeightsInV);
    }
    let n = w.len();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two weights".into()));
    }
    let checker = KedlayaChecker::new(mean.clone(), DEFAULT_TOL)?;
    let w = WeightVector::float(w.to_f64(), WeightClass::W)?;
    let refutes = |x: &[f64]| -> Option<KedlayaReport> {
        let rep = checker.check(x, &w).ok()?;
        (rep.gap > checker.tol() * (1.0 + rep.rhs.abs())).then_some(rep)
    };
    let domain = mean.domain();
    let mut evaluations = 0u64;
    if domain.contains(0.0) && domain.contains(1.0) {
        for k in 0..=40 {
            if evaluations == budget {
                return Ok(None);
            }
            evaluations += 1;
            let mut x = unit_tail(n);
            x[n - 2] = (-(k as f64)).exp2();
            if let Some(report) = refutes(&x) {
                return Ok(Some(ViolationWitness {
                    evaluations,
                    x,
                    report,
                }));
            }
        }
    }
    let window = domain.sampling_window();
    let floor = domain.lower.filter(|_| domain.lower_closed);
    let draw = |trial: u64| -> Vec<f64> {
        let mut rng = trial_rng(seed, trial);
        let mut x = sample_entries(&mut rng, window, n);
        if let Some(a) = floor {
            for v in &mut x {
                if rng.random::<f64>() < 0.25 {
                    *v = a;
                }
            }
        }
        x
    };
    let mut trial = 0u64;
    while evaluations < budget {
        let count = BATCH.min(budget - evaluations);
        let hit = (trial..trial + count)
            .into_par_iter()
            .find_first(|&t| refutes(&draw(t)).is_some());
        if let Some(t) = hit {
            let x = draw(t);
            let report = refutes(&x).expect("replay of a found witness");
            return Ok(Some(ViolationWitness {
                evaluations: evaluations + (t - trial) + 1,
                x,
                report,
            }));
        }
        evaluations += count;
        trial += count;
    }
    Ok(None)
}
