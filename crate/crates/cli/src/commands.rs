//! One function per subcommand. Each returns the formatted report and
//! whether the run should exit with status 1.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use kedlaya_core::concavity::{
    gini_concavity_condition, sample_jensen_concavity, ConcavityVerdict,
};
use kedlaya_core::kedlaya::{
    check_kedlaya, jensen_class, necessity_probe, search_violation, sweep as run_sweep,
    JensenClass, KedlayaChecker, KedlayaReport, NecessityProbe, SweepConfig, SweepRow,
    SweepSummary, SweepWeights, Verdict, ViolationWitness,
};
use kedlaya_core::means::{
    check_elimination, check_nullhomogeneity, check_reduction, check_symmetry, mean_value_residual,
    Axiom, AxiomInputs, AxiomResidual,
};
use kedlaya_core::sampling::{sample_entries, sample_entry, sample_simplex_weights, trial_rng};
use kedlaya_core::simple::{
    build_proof_function, proportional_set, verify_proof_construction, ProofCheck, QRectangle,
    SimpleFunction2D, SliceFailure,
};
use kedlaya_core::weights::Scalar;
use kedlaya_core::{Error, Family, MeanHandle, Rational, WeightClass, WeightVector};

use crate::args::{
    AxiomsArgs, CheckArgs, ConcavityArgs, Format, ProofFnArgs, ProportionalArgs, RefuteArgs,
    SweepArgs, WeightMode,
};
use crate::output::{csv, json, signed, write_data, CliError, Rendered};

/// Attributes input errors to the flag that carried the input.
fn blame(x_flag: &'static str, w_flag: &'static str) -> impl Fn(Error) -> CliError {
    move |e| {
        let flag = match e {
            Error::DomainViolation { .. } | Error::NonFinite(_) | Error::Empty => x_flag,
            Error::NegativeWeight { .. }
            | Error::AllZero
            | Error::FirstWeightZero
            | Error::WeightsInV
            | Error::WeightsNotInV(_)
            | Error::NonpositiveWeight(_)
            | Error::InteriorZeroWeight(_)
            | Error::LengthMismatch { .. } => w_flag,
            _ => return CliError::from(e),
        };
        CliError::at(flag)(e)
    }
}

fn class_name(c: JensenClass) -> &'static str {
    match c {
        JensenClass::Concave => "Jensen concave",
        JensenClass::Convex => "Jensen convex",
        JensenClass::Affine => "affine",
        JensenClass::Unknown => "of unknown Jensen class",
    }
}

#[derive(Serialize)]
struct CheckRow {
    n: usize,
    lhs: f64,
    rhs: f64,
    gap: f64,
    verdict: Verdict,
}

fn check_text(rep: &KedlayaReport) -> String {
    let tol = rep.inputs.tol * (1.0 + rep.rhs.abs());
    let membership = if rep.weights_in_v { "in" } else { "not in" };
    let mut s = String::new();
    let _ = writeln!(s, "mean     {}", rep.inputs.mean);
    let _ = writeln!(s, "n        {}", rep.n);
    let _ = writeln!(s, "lhs            {:+.15e}", rep.lhs);
    let _ = writeln!(s, "rhs            {:+.15e}", rep.rhs);
    let _ = writeln!(s, "rhs - lhs  {}", signed(rep.gap, tol));
    let _ = writeln!(
        s,
        "verdict  {:?} (mean {}, weights {membership} V_n)",
        rep.verdict,
        class_name(rep.jensen_class)
    );
    s
}

pub fn check(a: &CheckArgs) -> Result<Rendered, CliError> {
    let rep = check_kedlaya(&a.mean, &a.x.0, &a.w, a.tol).map_err(blame("--x", "--w"))?;
    let body = match a.output.format {
        Format::Json => json("check", &rep)?,
        Format::Csv => csv([CheckRow {
            n: rep.n,
            lhs: rep.lhs,
            rhs: rep.rhs,
            gap: rep.gap,
            verdict: rep.verdict,
        }])?,
        Format::Text => check_text(&rep),
    };
    Ok(Rendered {
        body,
        failed: rep.verdict == Verdict::Violated,
    })
}

#[derive(Serialize)]
struct SweepReport<'a> {
    mean: String,
    tol: f64,
    jensen_class: JensenClass,
    config: &'a SweepConfig,
    summary: &'a SweepSummary,
    rows: &'a [SweepRow],
}

pub fn sweep(a: &SweepArgs) -> Result<Rendered, CliError> {
    let checker = KedlayaChecker::new(a.mean.clone(), a.tol).map_err(CliError::at("--tol"))?;
    let weights = match (&a.w, a.weights) {
        (Some(w), _) => SweepWeights::Fixed(w.clone()),
        (None, WeightMode::Constant) => SweepWeights::Constant,
        (None, WeightMode::V) => SweepWeights::RandomV { max_den: a.max_den },
        (None, WeightMode::Integers) => SweepWeights::RandomIntegers { max: a.max_int },
    };
    let config = SweepConfig {
        n: a.n as usize,
        trials: a.trials,
        seed: a.seed,
        weights,
    };
    let result = run_sweep(&checker, &config).map_err(blame("--mean", "--w"))?;
    let s = &result.summary;
    let body = match a.output.format {
        Format::Json => json(
            "sweep",
            &SweepReport {
                mean: a.mean.id(),
                tol: a.tol,
                jensen_class: checker.class(),
                config: &config,
                summary: s,
                rows: &result.rows,
            },
        )?,
        Format::Csv => csv(&result.rows)?,
        Format::Text => {
            let mut t = String::new();
            let _ = writeln!(
                t,
                "mean       {} ({})",
                a.mean.id(),
                class_name(checker.class())
            );
            let _ = writeln!(t, "trials     {}", a.trials);
            let _ = writeln!(t, "holds      {}", s.holds);
            let _ = writeln!(t, "equality   {}", s.equality);
            let _ = writeln!(t, "reversed   {}", s.reversed);
            let _ = writeln!(t, "violated   {}", s.violated);
            if let (Some(lo), Some(hi)) = (s.min_gap, s.max_gap) {
                let _ = writeln!(t, "min gap    {lo:+.6e}");
                let _ = writeln!(t, "max gap    {hi:+.6e}");
            }
            if let Some(v) = &s.first_violation {
                let _ = writeln!(t, "\nfirst violation at x = {:?}", v.inputs.x);
                t.push_str(&check_text(v));
            }
            t
        }
    };
    Ok(Rendered {
        body,
        failed: s.violated > 0,
    })
}

#[derive(Serialize)]
struct RefuteReport {
    mean: String,
    budget: u64,
    seed: u64,
    reversed_asserted: bool,
    /// Derivative probe on the shortest prefix that leaves `V_n`.
    probe: Option<NecessityProbe>,
    /// Why the probe could not run, e.g. `0` outside the mean's domain.
    probe_error: Option<String>,
    witness: Option<ViolationWitness>,
}

pub fn refute(a: &RefuteArgs) -> Result<Rendered, CliError> {
    let witness =
        search_violation(&a.mean, &a.w, a.budget, a.seed).map_err(blame("--mean", "--w"))?;
    let prefix = a.w.v_violation().map_or(a.w.len(), |k| k + 2);
    let (probe, probe_error) =
        match necessity_probe(&a.mean, &a.w, prefix, a.step, a.assert_reversed) {
            Ok(p) => (Some(p), None),
            Err(e) => (None, Some(e.to_string())),
        };
    let failed =
        a.assert_reversed && (witness.is_some() || probe.as_ref().is_some_and(|p| !p.consistent));
    let rep = RefuteReport {
        mean: a.mean.id(),
        budget: a.budget,
        seed: a.seed,
        reversed_asserted: a.assert_reversed,
        probe,
        probe_error,
        witness,
    };
    let body = match a.output.format {
        Format::Json => json("refute", &rep)?,
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                prefix: Option<usize>,
                mu_prime_0: Option<f64>,
                lambda_condition: Option<bool>,
                applicable: Option<bool>,
                consistent: Option<bool>,
                found: bool,
                evaluations: Option<u64>,
                gap: Option<f64>,
            }
            let p = rep.probe.as_ref();
            let w = rep.witness.as_ref();
            csv([Row {
                prefix: p.map(|p| p.n),
                mu_prime_0: p.map(|p| p.mu_prime_0),
                lambda_condition: p.map(|p| p.lambda_condition),
                applicable: p.map(|p| p.applicable),
                consistent: p.map(|p| p.consistent),
                found: w.is_some(),
                evaluations: w.map(|w| w.evaluations),
                gap: w.map(|w| w.report.gap),
            }])?
        }
        Format::Text => {
            let mut t = String::new();
            let _ = writeln!(t, "mean      {}", rep.mean);
            match (&rep.probe, &rep.probe_error) {
                (Some(p), _) => {
                    let _ = writeln!(t, "probe     n = {}, mu'(0) = {:+.9e}", p.n, p.mu_prime_0);
                    if let Some(exact) = p.analytic_mu_prime_0 {
                        let _ = writeln!(t, "          analytic mu'(0) = {exact:+.9e}");
                    }
                    let _ = writeln!(
                        t,
                        "          ratio condition {}, argument {}applicable, {}",
                        if p.lambda_condition { "holds" } else { "fails" },
                        if p.applicable { "" } else { "not " },
                        if p.consistent {
                            "consistent"
                        } else {
                            "INCONSISTENT"
                        }
                    );
                }
                (None, Some(e)) => {
                    let _ = writeln!(t, "probe     skipped: {e}");
                }
                (None, None) => {}
            }
            match &rep.witness {
                Some(w) => {
                    let _ = writeln!(
                        t,
                        "witness   x = {:?} after {} candidates",
                        w.x, w.evaluations
                    );
                    t.push_str(&check_text(&w.report));
                }
                None => {
                    let _ = writeln!(t, "witness   none within {} candidates", rep.budget);
                }
            }
            t
        }
    };
    Ok(Rendered { body, failed })
}

#[derive(Serialize)]
struct ConcavityReport {
    mean: String,
    n: u64,
    seed: u64,
    tol: f64,
    analytic: JensenClass,
    /// `gini_concavity_condition(p, q)` for Gini means.
    gini_condition: Option<bool>,
    sampled: ConcavityVerdict,
    /// False when a sampled witness contradicts an analytic claim.
    consistent: bool,
}

pub fn concavity(a: &ConcavityArgs) -> Result<Rendered, CliError> {
    let sampled = sample_jensen_concavity(&a.mean, a.n as usize, a.trials, a.tol, a.seed)?;
    let analytic = jensen_class(&a.mean);
    let gini_condition = match a.mean.family() {
        Family::Gini { p, q } => Some(gini_concavity_condition(*p, *q)),
        _ => None,
    };
    let concave_claimed = analytic == JensenClass::Concave
        || analytic == JensenClass::Affine
        || gini_condition == Some(true);
    let convex_claimed = analytic == JensenClass::Convex || analytic == JensenClass::Affine;
    let consistent = !(concave_claimed && sampled.concavity_witness.is_some())
        && !(convex_claimed && sampled.convexity_witness.is_some());
    let rep = ConcavityReport {
        mean: a.mean.id(),
        n: a.n,
        seed: a.seed,
        tol: a.tol,
        analytic,
        gini_condition,
        sampled,
        consistent,
    };
    let body = match a.output.format {
        Format::Json => json("concavity", &rep)?,
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                mean: String,
                analytic: JensenClass,
                gini_condition: Option<bool>,
                sampled: kedlaya_core::concavity::Verdict,
                worst_violation: f64,
                trials: u64,
                consistent: bool,
            }
            csv([Row {
                mean: rep.mean.clone(),
                analytic,
                gini_condition,
                sampled: rep.sampled.verdict,
                worst_violation: rep.sampled.worst_violation,
                trials: rep.sampled.trials,
                consistent,
            }])?
        }
        Format::Text => {
            let mut t = String::new();
            let _ = writeln!(t, "mean       {}", rep.mean);
            let _ = writeln!(t, "analytic   {analytic:?}");
            if let Some(c) = gini_condition {
                let _ = writeln!(t, "condition  {}", if c { "holds" } else { "fails" });
            }
            let _ = writeln!(
                t,
                "sampled    {:?} over {} trials",
                rep.sampled.verdict, rep.sampled.trials
            );
            if let Some(w) = rep.sampled.witness() {
                let _ = writeln!(t, "witness    x = {:?}, y = {:?}, w = {:?}", w.x, w.y, w.w);
                let _ = writeln!(t, "           midpoint gap {}", signed(w.gap, a.tol));
            }
            let _ = writeln!(
                t,
                "{}",
                if consistent {
                    "consistent"
                } else {
                    "INCONSISTENT"
                }
            );
            t
        }
    };
    Ok(Rendered {
        body,
        failed: !consistent,
    })
}

#[derive(Clone, Serialize)]
struct AxiomRow {
    axiom: Axiom,
    max_residual: f64,
    passed: bool,
    #[serde(skip)]
    worst: AxiomInputs,
}

#[derive(Serialize)]
struct AxiomWorst<'a> {
    axiom: Axiom,
    max_residual: f64,
    passed: bool,
    worst: &'a AxiomInputs,
}

#[derive(Serialize)]
struct AxiomsReport<'a> {
    mean: String,
    trials: u64,
    seed: u64,
    tol: f64,
    axioms: Vec<AxiomWorst<'a>>,
}

/// The five residuals of one random instance.
fn axiom_trial(
    mean: &MeanHandle,
    max_n: usize,
    seed: u64,
    trial: u64,
) -> Result<[AxiomResidual; 5], Error> {
    let mut rng = trial_rng(seed, trial);
    let window = mean.domain().sampling_window();
    let n = rng.random_range(1..=max_n);
    let x = sample_entries(&mut rng, window, n);
    let w = WeightVector::float(sample_simplex_weights(&mut rng, n), WeightClass::W)?;
    let t = sample_entry(&mut rng, (1e-3, 1e3));
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let lambda = sample_simplex_weights(&mut rng, n);
    let mu = sample_simplex_weights(&mut rng, n);
    // The elimination axiom needs a zero weight; insert one at a random place.
    let at = rng.random_range(0..=n);
    let mut xz = x.clone();
    let mut wz = w.to_f64();
    xz.insert(at, sample_entry(&mut rng, window));
    wz.insert(at, 0.0);
    let wz = WeightVector::float(wz, WeightClass::W)?;
    Ok([
        check_nullhomogeneity(mean, &x, &w, Scalar::Float(t))?,
        check_reduction(mean, &x, &lambda, &mu)?,
        mean_value_residual(mean, &x, &w)?,
        check_elimination(mean, &xz, &wz, at + 1)?,
        check_symmetry(mean, &x, &w, &perm)?,
    ])
}

pub fn axioms(a: &AxiomsArgs) -> Result<Rendered, CliError> {
    let results = (0..a.trials)
        .into_par_iter()
        .map(|t| axiom_trial(&a.mean, a.max_n as usize, a.seed, t))
        .collect::<Result<Vec<_>, Error>>()?;
    let mut rows: Vec<AxiomRow> = Axiom::ALL
        .iter()
        .map(|&axiom| AxiomRow {
            axiom,
            max_residual: 0.0,
            passed: true,
            worst: AxiomInputs::default(),
        })
        .collect();
    for trial in results {
        for (row, r) in rows.iter_mut().zip(trial) {
            // A NaN residual sticks, and then fails the tolerance check.
            if !row.max_residual.is_nan() && (r.residual.is_nan() || r.residual > row.max_residual)
            {
                row.max_residual = r.residual;
                row.worst = r.inputs;
            }
        }
    }
    for row in &mut rows {
        row.passed = row.max_residual <= a.tol;
    }
    let failed = rows.iter().any(|r| !r.passed);
    let body = match a.output.format {
        Format::Json => json(
            "axioms",
            &AxiomsReport {
                mean: a.mean.id(),
                trials: a.trials,
                seed: a.seed,
                tol: a.tol,
                axioms: rows
                    .iter()
                    .map(|r| AxiomWorst {
                        axiom: r.axiom,
                        max_residual: r.max_residual,
                        passed: r.passed,
                        worst: &r.worst,
                    })
                    .collect(),
            },
        )?,
        Format::Csv => csv(&rows)?,
        Format::Text => {
            let mut t = format!("mean {} over {} instances\n", a.mean.id(), a.trials);
            for r in &rows {
                let _ = writeln!(
                    t,
                    "{:<16} {:.3e}  {}",
                    format!("{:?}", r.axiom),
                    r.max_residual,
                    if r.passed { "ok" } else { "FAIL" }
                );
            }
            t
        }
    };
    Ok(Rendered { body, failed })
}

#[derive(Serialize)]
struct RectRow {
    x0: Rational,
    x1: Rational,
    y0: Rational,
    y1: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
}

fn rect_row(r: &QRectangle, value: Option<f64>) -> RectRow {
    RectRow {
        x0: r.x.lower(),
        x1: r.x.upper(),
        y0: r.y.lower(),
        y1: r.y.upper(),
        value,
    }
}

fn rect_floats(r: &QRectangle) -> Vec<f64> {
    vec![
        r.x.lower().to_f64(),
        r.x.upper().to_f64(),
        r.y.lower().to_f64(),
        r.y.upper().to_f64(),
    ]
}

#[derive(Serialize)]
struct ProofFnReport<'a> {
    j: usize,
    function: &'a SimpleFunction2D,
    check: Option<ProofCheck>,
}

pub fn proof_fn(a: &ProofFnArgs) -> Result<Rendered, CliError> {
    let f = build_proof_function(&a.x.0, &a.w, a.j).map_err(|e| match e {
        Error::IndexOutOfRange { .. } => CliError::at("--j")(e),
        e => blame("--x", "--w")(e),
    })?;
    let check = a
        .mean
        .as_ref()
        .map(|m| verify_proof_construction(m, &a.x.0, &a.w, a.j, a.tol))
        .transpose()
        .map_err(blame("--x", "--w"))?;
    if let Some(path) = &a.data {
        let rows = f.pieces().iter().map(|p| {
            let mut row = rect_floats(&p.rect);
            row.push(p.value);
            row
        });
        write_data(path, "x0 x1 y0 y1 value", rows)?;
    }
    let body = match a.output.format {
        Format::Json => json(
            "proof-fn",
            &ProofFnReport {
                j: a.j,
                function: &f,
                check,
            },
        )?,
        Format::Csv => csv(f.pieces().iter().map(|p| rect_row(&p.rect, Some(p.value))))?,
        Format::Text => {
            let d = f.domain();
            let mut t = format!(
                "domain [{}, {}) x [{}, {})\n",
                d.x.lower(),
                d.x.upper(),
                d.y.lower(),
                d.y.upper()
            );
            for p in f.pieces() {
                let r = &p.rect;
                let _ = writeln!(
                    t,
                    "[{}, {}) x [{}, {})  {}",
                    r.x.lower(),
                    r.x.upper(),
                    r.y.lower(),
                    r.y.upper(),
                    p.value
                );
            }
            if let Some(c) = &check {
                let _ = writeln!(
                    t,
                    "lhs  step {:+.15e}  integral {:+.15e}",
                    c.step_lhs, c.jf_lhs
                );
                let _ = writeln!(
                    t,
                    "rhs  step {:+.15e}  integral {:+.15e}",
                    c.step_rhs, c.jf_rhs
                );
                let _ = writeln!(t, "{}", if c.agree { "agree" } else { "DISAGREE" });
            }
            t
        }
    };
    Ok(Rendered {
        body,
        failed: check.is_some_and(|c| !c.agree),
    })
}

#[derive(Serialize)]
struct ProportionalReport<'a> {
    theta: Rational,
    host: QRectangle,
    count: usize,
    rectangles: &'a [QRectangle],
    verify: bool,
    failure: Option<SliceFailure>,
}

pub fn proportional(a: &ProportionalArgs) -> Result<Rendered, CliError> {
    let set = proportional_set(a.host, a.theta).map_err(CliError::at("--theta"))?;
    let report = kedlaya_core::simple::verify_proportionality(&set);
    if let Some(path) = &a.data {
        write_data(
            path,
            "x0 x1 y0 y1",
            set.rectangles().iter().map(rect_floats),
        )?;
    }
    let body = match a.output.format {
        Format::Json => json(
            "proportional",
            &ProportionalReport {
                theta: a.theta,
                host: a.host,
                count: set.rectangles().len(),
                rectangles: set.rectangles(),
                verify: report.ok,
                failure: report.failure.clone(),
            },
        )?,
        Format::Csv => csv(set.rectangles().iter().map(|r| rect_row(r, None)))?,
        Format::Text => {
            let mut t = format!(
                "theta {} on {} rectangles\n",
                a.theta,
                set.rectangles().len()
            );
            for r in set.rectangles() {
                let _ = writeln!(
                    t,
                    "[{}, {}) x [{}, {})",
                    r.x.lower(),
                    r.x.upper(),
                    r.y.lower(),
                    r.y.upper()
                );
            }
            match &report.failure {
                None => t.push_str("verified\n"),
                Some(f) => {
                    let _ = writeln!(t, "NOT proportional: {f}");
                }
            }
            t
        }
    };
    Ok(Rendered {
        body,
        failed: !report.ok,
    })
}
