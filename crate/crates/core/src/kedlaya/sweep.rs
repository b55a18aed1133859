//! Seeded random sweeps of the inequality.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{KedlayaChecker, KedlayaReport, Verdict};
use crate::error::{Error, Result};
use crate::sampling::{random_integer_weights, random_v_weights, sample_entries, trial_rng};
use crate::weights::{WeightClass, WeightVector};

/// How each trial picks its weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepWeights {
    /// All ones.
    Constant,
    /// The same vector in every trial; its length fixes `n`.
    Fixed(WeightVector),
    /// Random exact vectors in `V_n` with ratio denominators up to `max_den`.
    RandomV { max_den: i64 },
    /// Random integers in `1..=max`, in `V_n` or not.
    RandomIntegers { max: i64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub weights: SweepWeights,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub trial: u64,
    pub n: usize,
    pub gap: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub holds: u64,
    pub reversed: u64,
    pub violated: u64,
    pub equality: u64,
    pub min_gap: Option<f64>,
    pub max_gap: Option<f64>,
    /// Full report of the first violated trial.
    pub first_violation: Option<KedlayaReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
}

/// Trial `t` draws from its own stream `(seed, t)`, so the rows do not
/// depend on the thread count.
pub fn sweep(checker: &KedlayaChecker, config: &SweepConfig) -> Result<SweepResult> {
    let n = match &config.weights {
        SweepWeights::Fixed(w) => w.len(),
        _ => config.n,
    };
    if n == 0 {
        return Err(Error::Empty);
    }
    let window = checker.mean().domain().sampling_window();
    let instance = |trial: u64| -> Result<(Vec<f64>, WeightVector)> {
        let mut rng = trial_rng(config.seed, trial);
        let w = match &config.weights {
            SweepWeights::Constant => WeightVector::from_integers(&vec![1; n], WeightClass::W0)?,
            SweepWeights::Fixed(w) => w.clone(),
            SweepWeights::RandomV { max_den } => random_v_weights(&mut rng, n, *max_den)?,
            SweepWeights::RandomIntegers { max } => random_integer_weights(&mut rng, n, *max),
        };
        Ok((sample_entries(&mut rng, window, n), w))
    };
    let reports = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let (x, w) = instance(t)?;
            checker.check(&x, &w)
        })
        .collect::<Result<Vec<KedlayaReport>>>()?;
    let mut summary = SweepSummary::default();
    let mut rows = Vec::with_capacity(reports.len());
    for (trial, rep) in (0..).zip(reports) {
        match rep.verdict {
            Verdict::Holds => summary.holds += 1,
            Verdict::Reversed => summary.reversed += 1,
            Verdict::Violated => summary.violated += 1,
            Verdict::Equality => summary.equality += 1,
        }
        summary.min_gap = Some(summary.min_gap.map_or(rep.gap, |g| g.min(rep.gap)));
        summary.max_gap = Some(summary.max_gap.map_or(rep.gap, |g| g.max(rep.gap)));
        rows.push(SweepRow {
            trial,
            n: rep.n,
            gap: rep.gap,
            verdict: rep.verdict,
        });
        if rep.verdict == Verdict::Violated && summary.first_violation.is_none() {
            summary.first_violation = Some(rep);
        }
    }
    Ok(SweepResult { rows, summary })
}
