//! Deterministic inputs shared by the benchmarks.

use kedlaya_core::sampling::{random_v_weights, sample_entries, sample_simplex_weights, trial_rng};
use kedlaya_core::{MeanHandle, WeightVector};

/// Mean ids covering closed forms, quasi-arithmetic means and the solver.
pub const MEANS: &[&str] = &[
    "arithmetic",
    "power:0",
    "power:0.5",
    "gini:0.5:0",
    "gini21",
    "qa:exp",
    "homdev:log",
    "homdev:shifted-power:0.5",
];

pub fn mean(id: &str) -> MeanHandle {
    id.parse().expect("built-in mean id")
}

/// Entries from the mean's sampling window with simplex weights.
pub fn mean_input(mean: &MeanHandle, n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = trial_rng(seed, n as u64);
    let x = sample_entries(&mut rng, mean.domain().sampling_window(), n);
    (x, sample_simplex_weights(&mut rng, n))
}

/// Entries with exact weights in `V_n`.
pub fn kedlaya_input(mean: &MeanHandle, n: usize, seed: u64) -> (Vec<f64>, WeightVector) {
    let mut rng = trial_rng(seed, n as u64);
    let w = random_v_weights(&mut rng, n, 8).expect("small denominators fit");
    (
        sample_entries(&mut rng, mean.domain().sampling_window(), n),
        w,
    )
}
