//! The step function behind the proof of the weighted inequality.
//!
//! For `2 ≤ j ≤ n` the square `[0, Λ_j)²` is cut into the blocks
//! `B_k = [0, Λ_{j−1}) × [Λ_{k−1}, Λ_k)` and `C_k = [Λ_{j−1}, Λ_j) × [Λ_{k−1}, Λ_k)`.
//! With `H_k ⊆ B_k` a `θ_k`-proportional subset, `θ_k = λ_jΛ_{k−1}/(λ_kΛ_{j−1})`,
//!
//! ```text
//! f = m_{k−1} on H_k,   f = m_k on B_k ∖ H_k,   f = x_k on C_k.
//! ```
//!
//! Every row of the strip `Λ_{k−1} ≤ y < Λ_k` then has arithmetic mean `m_k`,
//! and every column over `[0, Λ_{j−1})` takes the value `m_k` on a set of
//! measure `Λ_jλ_k/Λ_{j−1}`. Normalised by `Λ_j`, the two sides of the
//! Jensen–Fubini inequality for `f` are the two sides of the `j`-th step
//! inequality.

use serde::{Deserialize, Serialize};

use super::{
    jensen_fubini_sides, proportional_rows, Piece2D, QInterval, QRectangle, SimpleFunction2D,
};
use crate::error::{Error, Result};
use crate::kedlaya::{partial_arithmetic_means, step_inequality};
use crate::means::MeanHandle;
use crate::rational::Rational;
use crate::weights::WeightVector;

/// Builds `f` on `[0, Λ_j)²` for the `j`-th step (`j` counts from 1).
///
/// Requires exact weights with `λ_1, …, λ_j > 0` and `θ_k ≤ 1` for all
/// `k ≤ j`, which holds when `λ ∈ V_n`.
pub fn build_proof_function(x: &[f64], w: &WeightVector, j: usize) -> Result<SimpleFunction2D> {
    let lam = w.rationals().ok_or_else(|| {
        Error::InvalidArgument("the proof construction needs exact weights".into())
    })?;
    if x.len() != lam.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: lam.len(),
        });
    }
    if j < 2 || j > lam.len() {
        return Err(Error::IndexOutOfRange {
            index: j,
            len: lam.len(),
        });
    }
    if let Some(k) = lam[..j].iter().position(|l| !l.is_positive()) {
        return Err(Error::NonpositiveWeight(k));
    }
    let m = partial_arithmetic_means(x, w)?;
    let mut sums = vec![Rational::ZERO];
    for l in &lam[..j] {
        sums.push(sums[sums.len() - 1].checked_add(*l)?);
    }
    let (cut, side) = (sums[j - 1], sums[j]);
    let lam_j = lam[j - 1];
    let mut pieces = Vec::new();
    for k in 1..=j {
        let strip = QInterval::new(sums[k - 1], sums[k])?;
        let theta = lam_j
            .checked_mul(sums[k - 1])?
            .checked_div(lam[k - 1].checked_mul(cut)?)?;
        if theta > Rational::ONE {
            return Err(Error::WeightsNotInV(format!(
                "λ_{k}/Λ_{k} < λ_{j}/Λ_{j}, so the block {k} would need proportion {theta} > 1"
            )));
        }
        let block = QRectangle::new(QInterval::new(Rational::ZERO, cut)?, strip);
        let (h, rest) = proportional_rows(block, theta)?;
        // θ_1 = 0, so `m_{k−1}` is only read for k ≥ 2.
        pieces.extend(h.into_iter().map(|rect| Piece2D {
            rect,
            value: m[k.max(2) - 2],
        }));
        pieces.extend(rest.into_iter().map(|rect| Piece2D {
            rect,
            value: m[k - 1],
        }));
        pieces.push(Piece2D {
            rect: QRectangle::new(QInterval::new(cut, side)?, strip),
            value: x[k - 1],
        });
    }
    let square = QInterval::new(Rational::ZERO, side)?;
    SimpleFunction2D::new(QRectangle::new(square, square), pieces)
}

/// Jensen–Fubini sides of the constructed function next to the step sides
/// divided by `Λ_j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProofCheck {
    pub jf_lhs: f64,
    pub jf_rhs: f64,
    pub step_lhs: f64,
    pub step_rhs: f64,
    /// Both pairs agree within the absolute tolerance.
    pub agree: bool,
}

/// Computes both pipelines independently and compares them.
pub fn verify_proof_construction(
    mean: &MeanHandle,
    x: &[f64],
    w: &WeightVector,
    j: usize,
    tol: f64,
) -> Result<ProofCheck> {
    let f = build_proof_function(x, w, j)?;
    let (jf_lhs, jf_rhs) = jensen_fubini_sides(mean, &f)?;
    let (l, r) = step_inequality(mean, x, w, j)?;
    let total: f64 = w.to_f64()[..j].iter().sum();
    let (step_lhs, step_rhs) = (l / total, r / total);
    Ok(ProofCheck {
        jf_lhs,
        jf_rhs,
        step_lhs,
        step_rhs,
        agree: (jf_lhs - step_lhs).abs() <= tol && (jf_rhs - step_rhs).abs() <= tol,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::sampling::{random_v_weights, sample_entries, trial_rng};
    use crate::weights::WeightClass;
    use proptest::prelude::*;

    fn m(id: &str) -> MeanHandle {
        id.parse().unwrap()
    }

    fn w(v: &[i64]) -> WeightVector {
        WeightVector::from_integers(v, WeightClass::W0).unwrap()
    }

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn two_point_example() {
        let f = build_proof_function(&[1.0, 4.0], &w(&[1, 1]), 2).unwrap();
        assert_eq!(
            f.domain(),
            QRectangle::from_bounds(r("0"), r("2"), r("0"), r("2")).unwrap()
        );
        // θ_2 = λ_2Λ_1/(λ_2Λ_1) = 1, so B_2 = H_2 carries m_1.
        for (px, py, v) in [
            ("1/2", "1/2", 1.0),
            ("1/2", "3/2", 1.0),
            ("3/2", "1/2", 1.0),
            ("3/2", "3/2", 4.0),
        ] {
            assert_eq!(f.value_at(r(px), r(py)), Some(v), "({px}, {py})");
        }
        let (l, rr) = jensen_fubini_sides(&m("power:0"), &f).unwrap();
        assert!((l - 1.5).abs() < 1e-15);
        assert!((rr - 2.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn verification_examples() {
        let c =
            verify_proof_construction(&m("power:0"), &[1.0, 4.0], &w(&[1, 1]), 2, 1e-9).unwrap();
        assert!(c.agree, "{c:?}");
        let c =
            verify_proof_construction(&m("gini:1:0"), &[2.0, 3.0, 5.0], &w(&[4, 2, 1]), 3, 1e-9)
                .unwrap();
        assert!(c.agree, "{c:?}");
        assert!((c.jf_lhs - c.jf_rhs).abs() < 1e-12);
    }

    #[test]
    fn constant_entries_give_a_constant_function() {
        let f = build_proof_function(&[2.5; 4], &w(&[6, 3, 2, 1]), 4).unwrap();
        assert!(f.pieces().iter().all(|p| p.value == 2.5));
    }

    #[test]
    fn rejects_bad_inputs() {
        let x = [1.0, 2.0, 3.0];
        assert!(matches!(
            build_proof_function(&x, &w(&[1, 1, 4]), 3),
            Err(Error::WeightsNotInV(_))
        ));
        assert!(matches!(
            build_proof_function(&x, &w(&[1, 0, 0]), 2),
            Err(Error::NonpositiveWeight(1))
        ));
        assert!(build_proof_function(&x, &w(&[1, 1, 1]), 1).is_err());
        assert!(build_proof_function(&x, &w(&[1, 1, 1]), 4).is_err());
        let float = WeightVector::float(vec![1.0, 1.0, 1.0], WeightClass::W0).unwrap();
        assert!(matches!(
            build_proof_function(&x, &float, 2),
            Err(Error::InvalidArgument(_))
        ));
        // Weights outside V_n are fine as long as the first j ratios decrease.
        assert!(build_proof_function(&x, &w(&[1, 1, 4]), 2).is_ok());
    }

    #[test]
    fn rows_average_to_prefix_means_for_j_equal_two() {
        let x = [3.0, 0.5, 7.0, 2.0];
        let wv = w(&[1, 1, 1, 1]);
        let f = build_proof_function(&x, &wv, 2).unwrap();
        let ar = MeanHandle::arithmetic();
        for (cell, slice) in f.row_slices().unwrap() {
            if cell.upper() <= Rational::ONE {
                assert_eq!(super::super::m_integral(&ar, &slice).unwrap(), 3.0);
            }
        }
    }

    fn instance(seed: u64) -> (Vec<f64>, WeightVector, usize) {
        let mut rng = trial_rng(seed, 0);
        let n = 2 + (seed % 5) as usize;
        let wv = random_v_weights(&mut rng, n, 5).unwrap();
        let x = sample_entries(&mut rng, (0.01, 100.0), n);
        let j = 2 + (seed / 5 % (n as u64 - 1)) as usize;
        (x, wv, j)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn row_slices_average_to_prefix_means(seed in any::<u64>()) {
            let (x, wv, j) = instance(seed);
            let f = build_proof_function(&x, &wv, j).unwrap();
            let means = partial_arithmetic_means(&x, &wv).unwrap();
            let sums = wv.partial_sums().unwrap();
            let ar = MeanHandle::arithmetic();
            for (cell, slice) in f.row_slices().unwrap() {
                let k = (1..=j).find(|&k| match sums.get(k) {
                    crate::weights::Scalar::Exact(s) => cell.upper() <= s,
                    _ => unreachable!(),
                }).unwrap();
                let avg = super::super::m_integral(&ar, &slice).unwrap();
                prop_assert!((avg - means[k - 1]).abs() <= 1e-12 * (1.0 + means[k - 1].abs()));
            }
        }

        #[test]
        fn column_profile_is_exact(seed in any::<u64>()) {
            let (x, wv, j) = instance(seed);
            let f = build_proof_function(&x, &wv, j).unwrap();
            let means = partial_arithmetic_means(&x, &wv).unwrap();
            let lam = wv.rationals().unwrap();
            let cut = Rational::sum(&lam[..j - 1]).unwrap();
            let side = cut.checked_add(lam[j - 1]).unwrap();
            // Keyed by value; the random entries make the prefix means distinct.
            let mut expected: BTreeMap<u64, Rational> = BTreeMap::new();
            for k in 1..j {
                let measure = side.checked_mul(lam[k - 1]).unwrap().checked_div(cut).unwrap();
                let e = expected.entry(means[k - 1].to_bits()).or_insert(Rational::ZERO);
                *e = e.checked_add(measure).unwrap();
            }
            for (cell, slice) in f.column_slices().unwrap() {
                if cell.upper() > cut {
                    continue;
                }
                let mut profile: BTreeMap<u64, Rational> = BTreeMap::new();
                for (d, v) in slice.pieces() {
                    let e = profile.entry(v.to_bits()).or_insert(Rational::ZERO);
                    *e = e.checked_add(d.length().unwrap()).unwrap();
                }
                prop_assert_eq!(&profile, &expected);
            }
        }

        #[test]
        fn both_pipelines_agree(seed in any::<u64>(), id in prop::sample::select(vec!["arithmetic", "power:0", "gini:0.5:0", "gini21", "min"])) {
            let (x, wv, j) = instance(seed);
            let c = verify_proof_construction(&m(id), &x, &wv, j, 1e-9).unwrap();
            prop_assert!(c.agree, "{:?}", c);
        }

        #[test]
        fn concave_means_satisfy_jensen_fubini(seed in any::<u64>(), id in prop::sample::select(vec!["power:0", "power:-1", "gini:0.5:-1", "qa:log", "min"])) {
            let (x, wv, j) = instance(seed);
            let f = build_proof_function(&x, &wv, j).unwrap();
            let (l, rr) = jensen_fubini_sides(&m(id), &f).unwrap();
            prop_assert!(l <= rr + 1e-9, "{} {} {}", id, l, rr);
        }
    }
}
