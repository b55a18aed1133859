//! Deterministic random inputs for sweeps.
//!
//! Every trial gets its own ChaCha stream derived from `(seed, trial)`, so a
//! sweep produces the same samples whatever the thread count or order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::weights::{WeightClass, WeightVector};

pub type TrialRng = ChaCha8Rng;

pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// One draw from a finite window: log-uniform when the window is positive,
/// mirrored log-uniform when it is negative, uniform otherwise.
pub fn sample_entry<R: Rng>(rng: &mut R, (a, b): (f64, f64)) -> f64 {
    if a > 0.0 {
        let (la, lb) = (a.ln(), b.ln());
        (la + rng.random::<f64>() * (lb - la)).exp().clamp(a, b)
    } else if b < 0.0 {
        -sample_entry(rng, (-b, -a))
    } else {
        a + rng.random::<f64>() * (b - a)
    }
}

pub fn sample_entries<R: Rng>(rng: &mut R, window: (f64, f64), n: usize) -> Vec<f64> {
    (0..n).map(|_| sample_entry(rng, window)).collect()
}

/// Uniform on the simplex, rescaled to sum `n`.
pub fn sample_simplex_weights<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|v| v * n as f64 / total).collect()
}

/// Candidate ratios `a/d` with `1 ≤ a < d ≤ max_den`, sorted.
fn ratio_candidates(max_den: i64) -> Vec<Rational> {
    let mut out: Vec<Rational> = (2..=max_den)
        .flat_map(|d| (1..d).map(move |a| Rational::new(a, d).expect("nonzero denominator")))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// A random exact vector in `V_n` with positive entries.
///
/// Draws nonincreasing ratios `1 = r_1 ≥ r_2 ≥ ⋯ ≥ r_n > 0` with small
/// denominators and inverts `r_i = λ_i/Λ_i` via `λ_i = r_i Λ_{i−1}/(1 − r_i)`.
/// The result is rescaled to integer entries.
pub fn random_v_weights<R: Rng>(rng: &mut R, n: usize, max_den: i64) -> Result<WeightVector> {
    if n == 0 {
        return Err(Error::Empty);
    }
    if max_den < 2 {
        return Err(Error::InvalidArgument(format!(
            "max_den must be at least 2, got {max_den}"
        )));
    }
    let candidates = ratio_candidates(max_den);
    'retry: for _ in 0..64 {
        let mut lambdas = vec![Rational::ONE];
        let mut total = Rational::ONE;
        let mut upper = candidates.len();
        for _ in 1..n {
            let idx = rng.random_range(0..upper);
            upper = idx + 1;
            let r = candidates[idx];
            let step = r
                .checked_mul(total)
                .and_then(|v| v.checked_div(Rational::ONE.checked_sub(r)?));
            let Ok(l) = step else { continue 'retry };
            let Ok(t) = total.checked_add(l) else {
                continue 'retry;
            };
            lambdas.push(l);
            total = t;
        }
        let w = WeightVector::exact(lambdas, WeightClass::W0)?;
        if let Ok(ints) = w.clear_denominators() {
            return Ok(ints);
        }
    }
    Err(Error::Overflow("random V_n weights"))
}

/// Random positive integer weights in `1..=max`, any class.
pub fn random_integer_weights<R: Rng>(rng: &mut R, n: usize, max: i64) -> WeightVector {
    let v: Vec<i64> = (0..n).map(|_| rng.random_range(1..=max)).collect();
    WeightVector::from_integers(&v, WeightClass::W0).expect("positive entries")
}
