//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

// `!(a <= b)` is used deliberately so that NaN takes the failing branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use kedlaya_core::concavity::{
    gini_concavity_condition, sample_jensen_concavity, DEFAULT_TOL as CONCAVITY_TOL,
};
use kedlaya_core::deviation::{
    gini, power_mean, quasi_arithmetic, solve_deviation_mean, DeviationSpec, GeneratorSpec,
    DEFAULT_TOL as SOLVER_TOL,
};
use kedlaya_core::kedlaya::{
    check_kedlaya, kedlaya_sides, necessity_probe, search_violation, KedlayaChecker, Verdict,
    DEFAULT_STEP, DEFAULT_TOL,
};
use kedlaya_core::means::{
    check_elimination, check_nullhomogeneity, check_reduction, check_symmetry, mean_value_residual,
    Axiom,
};
use kedlaya_core::sampling::{
    random_v_weights, sample_entries, sample_entry, sample_simplex_weights, trial_rng,
};
use kedlaya_core::simple::{
    proportional_set, verify_proof_construction, verify_proportionality, QRectangle,
};
use kedlaya_core::weights::Scalar;
use kedlaya_core::{MeanHandle, Rational, WeightClass, WeightVector};

type Outcome = Result<String, String>;

fn mean(id: &str) -> MeanHandle {
    id.parse().expect("built-in mean id")
}

fn ones(n: usize) -> WeightVector {
    WeightVector::from_integers(&vec![1; n], WeightClass::W0).unwrap()
}

fn within(elapsed: Duration, limit: f64, detail: String) -> Outcome {
    let secs = elapsed.as_secs_f64();
    if secs < limit {
        Ok(format!("{detail}, {secs:.2}s"))
    } else {
        Err(format!("{detail}, but took {secs:.2}s (limit {limit}s)"))
    }
}

/// Unweighted geometric-mean Kedlaya inequality.
fn classic_geometric() -> Outcome {
    let start = Instant::now();
    let geo = mean("power:0");
    let (l, r) = kedlaya_sides(&geo, &[1.0, 4.0], &ones(2)).map_err(|e| e.to_string())?;
    if (l - 1.5).abs() > 1e-15 || (r - 2.5f64.sqrt()).abs() > 1e-15 {
        return Err(format!("anchor x=(1,4) gave ({l}, {r})"));
    }
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for n in 2..=8 {
        let w = ones(n);
        for trial in 0..10_000 {
            let mut rng = trial_rng(1000 + n as u64, trial);
            let x = sample_entries(&mut rng, (0.01, 100.0), n);
            let (l, r) = kedlaya_sides(&geo, &x, &w).map_err(|e| e.to_string())?;
            let gap = r - l;
            if gap < -1e-9 {
                return Err(format!("gap {gap:e} at x={x:?}"));
            }
            worst = worst.min(gap);
            count += 1;
        }
    }
    within(
        start.elapsed(),
        10.0,
        format!("{count} vectors, n=2..8, min gap {worst:.3e}"),
    )
}

/// Weighted geometric inequality for random weights in V_n.
fn weighted_geometric() -> Outcome {
    let geo = mean("power:0");
    let mut worst = f64::INFINITY;
    for k in 0..1000u64 {
        let mut rng = trial_rng(2, k);
        let n = 1 + (k % 8) as usize;
        let w = random_v_weights(&mut rng, n, 8).map_err(|e| e.to_string())?;
        assert!(w.is_in_v());
        for _ in 0..100 {
            let x = sample_entries(&mut rng, (0.01, 100.0), n);
            let (l, r) = kedlaya_sides(&geo, &x, &w).map_err(|e| e.to_string())?;
            if r - l < -1e-9 {
                return Err(format!("gap {:e} at x={x:?}, w={w:?}", r - l));
            }
            worst = worst.min(r - l);
        }
    }
    Ok(format!(
        "1000 weight vectors x 100 entries, n=1..8, min gap {worst:.3e}"
    ))
}

/// The inequality for concave means and its reverse for Σλx²/Σλx.
fn forward_and_reversed() -> Outcome {
    let run = |id: &str, allowed: &[Verdict], seed: u64| -> Result<(u64, u64), String> {
        let checker = KedlayaChecker::new(mean(id), DEFAULT_TOL).map_err(|e| e.to_string())?;
        let window = checker.mean().domain().sampling_window();
        let (mut strict, mut equal) = (0, 0);
        for trial in 0..1000 {
            let mut rng = trial_rng(seed, trial);
            let n = 2 + (trial % 7) as usize;
            let w = random_v_weights(&mut rng, n, 8).map_err(|e| e.to_string())?;
            let x = sample_entries(&mut rng, window, n);
            let rep = checker.check(&x, &w).map_err(|e| e.to_string())?;
            if !allowed.contains(&rep.verdict) {
                return Err(format!(
                    "{id}: {:?} with gap {:e} at x={x:?}, w={w:?}",
                    rep.verdict, rep.gap
                ));
            }
            if rep.verdict == Verdict::Equality {
                equal += 1;
            } else {
                strict += 1;
            }
        }
        Ok((strict, equal))
    };
    let mut parts = Vec::new();
    for (i, id) in ["power:-1", "power:0", "power:0.5", "gini:0.5:-1", "qa:log"]
        .iter()
        .enumerate()
    {
        let (s, e) = run(id, &[Verdict::Holds, Verdict::Equality], 30 + i as u64)?;
        parts.push(format!("{id} {s}/{e}"));
    }
    let (s, e) = run("gini21", &[Verdict::Reversed, Verdict::Equality], 39)?;
    parts.push(format!("gini21 reversed {s}/{e}"));
    Ok(format!("strict/equal: {}", parts.join(", ")))
}

/// Necessity of the ratio condition via Σλx²/Σλx and λ = (1, 1, 4).
fn necessity() -> Outcome {
    let g = mean("gini21");
    let w = WeightVector::from_integers(&[1, 1, 4], WeightClass::W0).unwrap();
    let probe = necessity_probe(&g, &w, 3, DEFAULT_STEP, true).map_err(|e| e.to_string())?;
    let analytic = -1.0 / 4.0;
    if (probe.mu_prime_0 - analytic).abs() > 1e-6 {
        return Err(format!("mu'(0) = {} vs {analytic}", probe.mu_prime_0));
    }
    if probe.analytic_mu_prime_0 != Some(analytic) || probe.lambda_condition || probe.consistent {
        return Err(format!("unexpected probe {probe:?}"));
    }
    let found = search_violation(&g, &w, 100_000, 4).map_err(|e| e.to_string())?;
    let Some(found) = found else {
        return Err("no witness within 100000 candidates".into());
    };
    // Independent recheck of the witness.
    let rep = check_kedlaya(&g, &found.x, &w, DEFAULT_TOL).map_err(|e| e.to_string())?;
    if !(rep.rhs - rep.lhs > DEFAULT_TOL * (1.0 + rep.rhs.abs())) {
        return Err(format!("witness {:?} does not replay", found.x));
    }
    Ok(format!(
        "mu'(0) = {:.9} (error {:.1e}), witness x={:?} after {} candidates, gap {:.4e}",
        probe.mu_prime_0,
        (probe.mu_prime_0 - analytic).abs(),
        found.x,
        found.evaluations,
        rep.gap
    ))
}

/// The proof's step function reproduces the step inequality.
fn proof_machinery() -> Outcome {
    let means = [mean("arithmetic"), mean("power:0"), mean("gini:0.5:0")];
    let mut worst = 0.0f64;
    for trial in 0..1000u64 {
        let mut rng = trial_rng(5, trial);
        let m = &means[(trial % 3) as usize];
        let n = rng.random_range(2..=6);
        let w = random_v_weights(&mut rng, n, 6).map_err(|e| e.to_string())?;
        let x = sample_entries(&mut rng, (0.01, 100.0), n);
        let j = rng.random_range(2..=n);
        let c = verify_proof_construction(m, &x, &w, j, 1e-9).map_err(|e| e.to_string())?;
        if !c.agree {
            return Err(format!("{m} x={x:?} w={w:?} j={j}: {c:?}"));
        }
        worst = worst
            .max((c.jf_lhs - c.step_lhs).abs())
            .max((c.jf_rhs - c.step_rhs).abs());
    }
    Ok(format!("1000 instances, largest discrepancy {worst:.2e}"))
}

fn random_host(rng: &mut impl Rng) -> QRectangle {
    let mut r = |lo: i64, hi: i64| {
        Rational::new(rng.random_range(lo..hi), rng.random_range(1..30)).unwrap()
    };
    let (a, c) = (r(-50, 50), r(-50, 50));
    let (w, h) = (r(1, 50), r(1, 50));
    QRectangle::from_bounds(a, a.checked_add(w).unwrap(), c, c.checked_add(h).unwrap()).unwrap()
}

/// Exactness of the θ-proportional construction.
fn proportional_exactness() -> Outcome {
    let start = Instant::now();
    let mut count = 0u64;
    let mut rng = trial_rng(6, 0);
    for _ in 0..100 {
        let host = random_host(&mut rng);
        for q in 1..=50i64 {
            for p in 0..=q {
                let theta = Rational::new(p, q).unwrap();
                let h = proportional_set(host, theta).map_err(|e| e.to_string())?;
                let report = verify_proportionality(&h);
                if !report.ok {
                    return Err(format!(
                        "theta {p}/{q} on {host:?}: {}",
                        report.failure.unwrap()
                    ));
                }
                count += 1;
            }
        }
    }
    within(
        start.elapsed(),
        5.0,
        format!("{count} constructions on 100 hosts"),
    )
}

struct Family {
    id: &'static str,
    tol: f64,
}

const CLOSED: f64 = 1e-12;
const SOLVED: f64 = 1e-9;

const FAMILIES: &[Family] = &[
    Family {
        id: "arithmetic",
        tol: CLOSED,
    },
    Family {
        id: "min",
        tol: CLOSED,
    },
    Family {
        id: "max",
        tol: CLOSED,
    },
    Family {
        id: "power:-3",
        tol: CLOSED,
    },
    Family {
        id: "power:-1",
        tol: CLOSED,
    },
    Family {
        id: "power:0",
        tol: CLOSED,
    },
    Family {
        id: "power:0.5",
        tol: CLOSED,
    },
    Family {
        id: "power:3",
        tol: CLOSED,
    },
    Family {
        id: "qa:log",
        tol: CLOSED,
    },
    Family {
        id: "qa:exp",
        tol: CLOSED,
    },
    Family {
        id: "qa:identity",
        tol: CLOSED,
    },
    Family {
        id: "qa:pow:-1",
        tol: CLOSED,
    },
    Family {
        id: "qa:pow:2",
        tol: CLOSED,
    },
    Family {
        id: "gini:2:1",
        tol: CLOSED,
    },
    Family {
        id: "gini:0.5:-1",
        tol: CLOSED,
    },
    Family {
        id: "gini:0:0",
        tol: CLOSED,
    },
    Family {
        id: "gini:1:1",
        tol: CLOSED,
    },
    Family {
        id: "gini:3:-2",
        tol: CLOSED,
    },
    Family {
        id: "gini21",
        tol: CLOSED,
    },
    Family {
        id: "affine:-2:1:power:0.5",
        tol: CLOSED,
    },
    Family {
        id: "homdev:log",
        tol: SOLVED,
    },
    Family {
        id: "homdev:shifted-power:0.5",
        tol: SOLVED,
    },
    Family {
        id: "homdev:shifted-power:-1",
        tol: SOLVED,
    },
    Family {
        id: "homdev:shifted-power:2",
        tol: SOLVED,
    },
];

/// Residuals of the five axioms on random instances.
fn axioms() -> Outcome {
    let mut worst_closed = 0.0f64;
    let mut worst_solved = 0.0f64;
    for (fi, fam) in FAMILIES.iter().enumerate() {
        let m = mean(fam.id);
        let window = m.domain().sampling_window();
        let mut worst = [0.0f64; 5];
        for trial in 0..10_000u64 {
            let mut rng = trial_rng(700 + fi as u64, trial);
            let n = rng.random_range(1..=6);
            let x = sample_entries(&mut rng, window, n);
            let w =
                WeightVector::float(sample_simplex_weights(&mut rng, n), WeightClass::W).unwrap();
            let t = sample_entry(&mut rng, (1e-3, 1e3));
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let lambda = sample_simplex_weights(&mut rng, n);
            let mu = sample_simplex_weights(&mut rng, n);
            let mut xz = x.clone();
            let mut wz = w.to_f64();
            let at = rng.random_range(0..=n);
            xz.insert(at, sample_entry(&mut rng, window));
            wz.insert(at, 0.0);
            let wz = WeightVector::float(wz, WeightClass::W).unwrap();
            let residuals = [
                check_nullhomogeneity(&m, &x, &w, Scalar::Float(t)),
                check_reduction(&m, &x, &lambda, &mu),
                mean_value_residual(&m, &x, &w),
                check_elimination(&m, &xz, &wz, at + 1),
                check_symmetry(&m, &x, &w, &perm),
            ];
            for (k, r) in residuals.into_iter().enumerate() {
                let r = r.map_err(|e| format!("{}: {e}", fam.id))?;
                debug_assert_eq!(r.axiom, Axiom::ALL[k]);
                if !(r.residual <= fam.tol) {
                    return Err(format!(
                        "{} {:?} residual {:e} > {:e} at {:?}",
                        fam.id, r.axiom, r.residual, fam.tol, r.inputs
                    ));
                }
                worst[k] = worst[k].max(r.residual);
            }
        }
        let w = worst.iter().fold(0.0f64, |a, &b| a.max(b));
        if fam.tol == CLOSED {
            worst_closed = worst_closed.max(w);
        } else {
            worst_solved = worst_solved.max(w);
        }
    }
    Ok(format!(
        "{} families x 10000 instances, largest residual {worst_closed:.2e} (closed forms), {worst_solved:.2e} (solver)",
        FAMILIES.len()
    ))
}

/// The deviation solver against closed forms, and Gini against power means.
fn solver_oracle() -> Outcome {
    let gens: Vec<GeneratorSpec> = [
        Ok(GeneratorSpec::log()),
        Ok(GeneratorSpec::exp()),
        Ok(GeneratorSpec::identity()),
        GeneratorSpec::power(-2.0),
        GeneratorSpec::power(-1.0),
        GeneratorSpec::power(0.5),
        GeneratorSpec::power(2.0),
        GeneratorSpec::power(3.0),
    ]
    .into_iter()
    .collect::<Result<_, _>>()
    .map_err(|e| e.to_string())?;
    let specs: Vec<DeviationSpec> = gens
        .iter()
        .map(DeviationSpec::from_generator)
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for trial in 0..10_000u64 {
        let mut rng = trial_rng(8, trial);
        let k = (trial % gens.len() as u64) as usize;
        let n = rng.random_range(1..=8);
        let x = sample_entries(&mut rng, gens[k].domain().sampling_window(), n);
        let w = sample_simplex_weights(&mut rng, n);
        let solved =
            solve_deviation_mean(&specs[k], &x, &w, SOLVER_TOL).map_err(|e| e.to_string())?;
        let closed = quasi_arithmetic(&gens[k], &x, &w).map_err(|e| e.to_string())?;
        let d = (solved - closed).abs();
        if d > 1e-9 {
            return Err(format!(
                "{}: solver {solved} vs closed form {closed} at x={x:?}",
                gens[k].label()
            ));
        }
        worst = worst.max(d);
    }
    let mut worst_gini = 0.0f64;
    for step in 0..=24 {
        let p = -3.0 + 0.25 * step as f64;
        for trial in 0..400u64 {
            let mut rng = trial_rng(80 + step, trial);
            let n = rng.random_range(1..=8);
            let x = sample_entries(&mut rng, (0.01, 100.0), n);
            let w = sample_simplex_weights(&mut rng, n);
            let a = gini(p, 0.0, &x, &w).map_err(|e| e.to_string())?;
            let b = power_mean(p, &x, &w).map_err(|e| e.to_string())?;
            if (a - b).abs() > 1e-12 {
                return Err(format!("p={p}: gini {a} vs power {b} at x={x:?}, w={w:?}"));
            }
            worst_gini = worst_gini.max((a - b).abs());
        }
    }
    Ok(format!(
        "solver vs closed form max error {worst:.2e} on 10000 instances; gini(p,0) vs power(p) max error {worst_gini:.2e} on 25 exponents"
    ))
}

/// The Gini concavity condition against the sampler.
fn concavity_cross_check() -> Outcome {
    let values = [-1.0, 0.0, 0.5, 1.0, 2.0];
    let mut refuted = Vec::new();
    let mut confirmed = 0;
    for &p in &values {
        for &q in &values {
            let condition = gini_concavity_condition(p, q);
            let m = MeanHandle::gini(p, q).map_err(|e| e.to_string())?;
            if !condition && p > 0.0 && q > 0.0 {
                let v = sample_jensen_concavity(&m, 2, 100_000, CONCAVITY_TOL, 42)
                    .map_err(|e| e.to_string())?;
                match v.concavity_witness {
                    Some(wit) => refuted.push(format!("({p},{q})@{}", wit.trial)),
                    None => {
                        return Err(format!(
                            "no concavity violation for G({p},{q}) in 100000 trials"
                        ))
                    }
                }
            } else if condition {
                let v = sample_jensen_concavity(&m, 2, 10_000, CONCAVITY_TOL, 42)
                    .map_err(|e| e.to_string())?;
                if let Some(wit) = v.concavity_witness {
                    return Err(format!(
                        "G({p},{q}) satisfies the condition but failed concavity: {wit:?}"
                    ));
                }
                confirmed += 1;
            }
        }
    }
    if !refuted.iter().any(|s| s.starts_with("(2,1)")) {
        return Err("G(2,1) was not refuted".into());
    }
    Ok(format!(
        "{} refutations {}, {confirmed} condition-true pairs unrefuted",
        refuted.len(),
        refuted.join(" ")
    ))
}

type Criterion = fn() -> Outcome;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 9] = [
        ("unweighted geometric Kedlaya inequality", classic_geometric),
        (
            "weighted geometric inequality for weights in V_n",
            weighted_geometric,
        ),
        ("forward and reversed inequality sweeps", forward_and_reversed),
        ("necessity of the ratio condition", necessity),
        (
            "proof construction matches the step inequality",
            proof_machinery,
        ),
        ("exact theta-proportional sets", proportional_exactness),
        ("axiom conformance", axioms),
        ("deviation solver and Gini oracles", solver_oracle),
        ("Gini concavity condition vs sampler", concavity_cross_check),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
