//! Weighted means: the [`MeanHandle`] family tag, evaluation, and axiom checks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::deviation::{
    gini_on, homogeneous_deviation_on, power_mean_on, quasi_arithmetic_on, solve_on_support,
    support, DeviationSpec, GeneratorSpec, HomogeneousGenerator, Support, DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::parse::parse_f64;
use crate::weights::{shuffle, Scalar, WeightVector};

/// Default cap on the expanded length in [`weighted_from_repetition_invariant`].
pub const DEFAULT_EXPANSION_CAP: usize = 1_000_000;

#[derive(Clone, Debug)]
pub enum Family {
    Arithmetic,
    Min,
    Max,
    Power(f64),
    QuasiArithmetic(GeneratorSpec),
    Gini {
        p: f64,
        q: f64,
    },
    HomogeneousDeviation(HomogeneousGenerator),
    CustomDeviation(DeviationSpec),
    /// `Σλx²/Σλx`, extended by `0` where the denominator vanishes.
    Gini21Counterexample,
    /// `a·M((x − b)/a) + b`.
    Affine {
        inner: Box<MeanHandle>,
        a: f64,
        b: f64,
    },
}

/// A weighted mean: a family with its parameters, restricted to a domain.
#[derive(Clone, Debug)]
pub struct MeanHandle {
    family: Family,
    domain: Interval,
}

fn check_param(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidMean(format!(
            "{name} must be finite, got {v}"
        )))
    }
}

impl MeanHandle {
    pub fn new(family: Family) -> Result<Self> {
        let domain = Self::natural_domain(&family)?;
        match &family {
            Family::Power(p) => check_param("p", *p)?,
            Family::Gini { p, q } => {
                check_param("p", *p)?;
                check_param("q", *q)?;
            }
            _ => {}
        }
        Ok(MeanHandle { family, domain })
    }

    /// The largest domain the family is defined on.
    fn natural_domain(family: &Family) -> Result<Interval> {
        Ok(match family {
            Family::Arithmetic | Family::Min | Family::Max => Interval::REAL,
            Family::Power(_) | Family::Gini { .. } | Family::HomogeneousDeviation(_) => {
                Interval::POSITIVE
            }
            Family::QuasiArithmetic(g) => g.domain(),
            Family::CustomDeviation(s) => s.domain(),
            Family::Gini21Counterexample => Interval::NONNEGATIVE,
            Family::Affine { inner, a, b } => {
                check_param("a", *a)?;
                check_param("b", *b)?;
                inner.domain.affine_image(*a, *b)?
            }
        })
    }

    /// Restricts the mean to a subdomain of its natural domain.
    pub fn with_domain(mut self, domain: Interval) -> Result<Self> {
        let natural = Self::natural_domain(&self.family)?;
        if !domain.is_subset_of(&natural) {
            return Err(Error::InvalidMean(format!(
                "domain {domain} is not contained in {natural} for {}",
                self.id()
            )));
        }
        self.domain = domain;
        Ok(self)
    }

    pub fn arithmetic() -> Self {
        MeanHandle::new(Family::Arithmetic).expect("valid family")
    }

    pub fn min() -> Self {
        MeanHandle::new(Family::Min).expect("valid family")
    }

    pub fn max() -> Self {
        MeanHandle::new(Family::Max).expect("valid family")
    }

    pub fn geometric() -> Self {
        MeanHandle::new(Family::Power(0.0)).expect("valid family")
    }

    pub fn power(p: f64) -> Result<Self> {
        MeanHandle::new(Family::Power(p))
    }

    pub fn gini(p: f64, q: f64) -> Result<Self> {
        MeanHandle::new(Family::Gini { p, q })
    }

    pub fn gini21() -> Self {
        MeanHandle::new(Family::Gini21Counterexample).expect("valid family")
    }

    pub fn quasi_arithmetic(gen: GeneratorSpec) -> Self {
        MeanHandle::new(Family::QuasiArithmetic(gen)).expect("valid family")
    }

    pub fn homogeneous_deviation(gen: HomogeneousGenerator) -> Self {
        MeanHandle::new(Family::HomogeneousDeviation(gen)).expect("valid family")
    }

    pub fn custom_deviation(spec: DeviationSpec) -> Self {
        MeanHandle::new(Family::CustomDeviation(spec)).expect("valid family")
    }

    /// `M_{a,b}(x, λ) = a·M((x − b)/a, λ) + b` on the image domain `a·I + b`.
    pub fn affine_conjugate(&self, a: f64, b: f64) -> Result<Self> {
        if a == 0.0 {
            return Err(Error::ZeroScale);
        }
        MeanHandle::new(Family::Affine {
            inner: Box::new(self.clone()),
            a,
            b,
        })
    }

    /// The reflection `x ↦ −M(−x)`.
    pub fn reflection(&self) -> Result<Self> {
        self.affine_conjugate(-1.0, 0.0)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Whether evaluation runs the bisection solver rather than a closed form.
    pub fn uses_solver(&self) -> bool {
        match &self.family {
            Family::HomogeneousDeviation(_) | Family::CustomDeviation(_) => true,
            Family::Affine { inner, .. } => inner.uses_solver(),
            _ => false,
        }
    }

    /// Canonical string id, e.g. `power:0` or `gini:2:1`.
    pub fn id(&self) -> String {
        match &self.family {
            Family::Arithmetic => "arithmetic".into(),
            Family::Min => "min".into(),
            Family::Max => "max".into(),
            Family::Power(p) => format!("power:{p}"),
            Family::QuasiArithmetic(g) => format!("qa:{}", g.label()),
            Family::Gini { p, q } => format!("gini:{p}:{q}"),
            Family::HomogeneousDeviation(g) => format!("homdev:{}", g.label()),
            Family::CustomDeviation(s) => format!("custom:{}", s.label()),
            Family::Gini21Counterexample => "gini21".into(),
            Family::Affine { inner, a, b } => format!("affine:{a}:{b}:{}", inner.id()),
        }
    }

    /// Evaluates `M(x, λ)`.
    pub fn evaluate(&self, x: &[f64], w: &WeightVector) -> Result<f64> {
        self.eval(x, &w.to_f64())
    }

    /// Evaluates with plain float weights, validated the same way.
    pub fn eval(&self, x: &[f64], w: &[f64]) -> Result<f64> {
        let s = support(x, w, &self.domain)?;
        self.eval_support(&s)
    }

    fn eval_support(&self, s: &Support) -> Result<f64> {
        if let Some(c) = s.constant() {
            // Every family is reflexive; Gini21 also returns 0 at the zero vector.
            return Ok(c);
        }
        let total = s.total_weight();
        match &self.family {
            Family::Arithmetic => {
                let y = s.x.iter().zip(&s.w).map(|(&a, &l)| l * a).sum::<f64>() / total;
                Ok(y.clamp(s.min, s.max))
            }
            Family::Min => Ok(s.min),
            Family::Max => Ok(s.max),
            Family::Power(p) => power_mean_on(*p, s),
            Family::Gini { p, q } => gini_on(*p, *q, s),
            Family::QuasiArithmetic(g) => quasi_arithmetic_on(g, s),
            Family::HomogeneousDeviation(g) => homogeneous_deviation_on(g, s, DEFAULT_TOL),
            Family::CustomDeviation(spec) => {
                solve_on_support(&|a, y| spec.eval(a, y), s, DEFAULT_TOL)
            }
            Family::Gini21Counterexample => {
                let den: f64 = s.x.iter().zip(&s.w).map(|(&a, &l)| l * a).sum();
                if den == 0.0 {
                    return Ok(0.0);
                }
                let num: f64 = s.x.iter().zip(&s.w).map(|(&a, &l)| l * a * a).sum();
                Ok(num / den)
            }
            Family::Affine { inner, a, b } => {
                let x: Vec<f64> = s.x.iter().map(|&v| (v - b) / a).collect();
                let (lo, hi) = ((s.min - b) / a, (s.max - b) / a);
                let t = Support {
                    x,
                    w: s.w.clone(),
                    min: lo.min(hi),
                    max: lo.max(hi),
                };
                Ok(a * inner.eval_support(&t)? + b)
            }
        }
    }
}

impl fmt::Display for MeanHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

fn parse_generator(spec: &str) -> Result<GeneratorSpec> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["log"] => Ok(GeneratorSpec::log()),
        ["identity"] => Ok(GeneratorSpec::identity()),
        ["exp"] => Ok(GeneratorSpec::exp()),
        ["pow", p] => GeneratorSpec::power(parse_f64(p)?),
        _ => Err(Error::InvalidMean(format!("unknown generator {spec:?}"))),
    }
}

fn parse_homogeneous(spec: &str) -> Result<HomogeneousGenerator> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["log"] => HomogeneousGenerator::log(),
        ["shifted-power", p] => HomogeneousGenerator::shifted_power(parse_f64(p)?),
        _ => Err(Error::InvalidMean(format!(
            "unknown homogeneous generator {spec:?}"
        ))),
    }
}

/// Parses ids such as `arithmetic`, `geometric`, `power:-1`, `gini:1/2:0`,
/// `gini21`, `qa:log`, `qa:pow:2`, `homdev:shifted-power:-1` and
/// `affine:-1:0:power:0`.
impl FromStr for MeanHandle {
    type Err = Error;

    fn from_str(id: &str) -> Result<Self> {
        let id = id.trim();
        let unknown = || Error::InvalidMean(format!("unknown mean id {id:?}"));
        let (head, rest) = id.split_once(':').unwrap_or((id, ""));
        match head {
            "arithmetic" | "min" | "max" | "geometric" | "gini21" if !rest.is_empty() => {
                Err(unknown())
            }
            "arithmetic" => Ok(MeanHandle::arithmetic()),
            "min" => Ok(MeanHandle::min()),
            "max" => Ok(MeanHandle::max()),
            "geometric" => Ok(MeanHandle::geometric()),
            "gini21" => Ok(MeanHandle::gini21()),
            "power" => MeanHandle::power(parse_f64(rest)?),
            "gini" => {
                let (p, q) = rest.split_once(':').ok_or_else(unknown)?;
                MeanHandle::gini(parse_f64(p)?, parse_f64(q)?)
            }
            "qa" => Ok(MeanHandle::quasi_arithmetic(parse_generator(rest)?)),
            "homdev" => Ok(MeanHandle::homogeneous_deviation(parse_homogeneous(rest)?)),
            "affine" => {
                let mut it = rest.splitn(3, ':');
                let (a, b, inner) = match (it.next(), it.next(), it.next()) {
                    (Some(a), Some(b), Some(inner)) => (a, b, inner),
                    _ => return Err(unknown()),
                };
                inner
                    .parse::<MeanHandle>()?
                    .affine_conjugate(parse_f64(a)?, parse_f64(b)?)
            }
            _ => Err(unknown()),
        }
    }
}

/// JSON form: `{"family": "gini", "p": 2, "q": 1, "domain": [0, null]}`.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
struct MeanJson {
    family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inner: Option<Box<MeanJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<[Option<f64>; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    closed: Option<[bool; 2]>,
}

impl MeanJson {
    fn bare(family: &str) -> Self {
        MeanJson {
            family: family.into(),
            p: None,
            q: None,
            generator: None,
            a: None,
            b: None,
            inner: None,
            domain: None,
            closed: None,
        }
    }
}

impl TryFrom<&MeanHandle> for MeanJson {
    type Error = Error;

    fn try_from(m: &MeanHandle) -> Result<Self> {
        let mut j = match &m.family {
            Family::Arithmetic => MeanJson::bare("arithmetic"),
            Family::Min => MeanJson::bare("min"),
            Family::Max => MeanJson::bare("max"),
            Family::Power(p) => MeanJson {
                p: Some(*p),
                ..MeanJson::bare("power")
            },
            Family::Gini { p, q } => MeanJson {
                p: Some(*p),
                q: Some(*q),
                ..MeanJson::bare("gini")
            },
            Family::QuasiArithmetic(g) => MeanJson {
                generator: Some(g.label().to_string()),
                ..MeanJson::bare("qa")
            },
            Family::HomogeneousDeviation(g) => MeanJson {
                generator: Some(g.label().to_string()),
                ..MeanJson::bare("homdev")
            },
            Family::CustomDeviation(s) => {
                return Err(Error::InvalidMean(format!(
                    "custom deviation {:?} holds a callback and cannot be serialized",
                    s.label()
                )))
            }
            Family::Gini21Counterexample => MeanJson::bare("gini21"),
            Family::Affine { inner, a, b } => MeanJson {
                a: Some(*a),
                b: Some(*b),
                inner: Some(Box::new(MeanJson::try_from(inner.as_ref())?)),
                ..MeanJson::bare("affine")
            },
        };
        j.domain = Some([m.domain.lower, m.domain.upper]);
        j.closed = Some([m.domain.lower_closed, m.domain.upper_closed]);
        Ok(j)
    }
}

impl TryFrom<MeanJson> for MeanHandle {
    type Error = Error;

    fn try_from(j: MeanJson) -> Result<Self> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::InvalidMean(format!("{} needs field {name:?}", j.family)))
        };
        let generator = || {
            j.generator.clone().ok_or_else(|| {
                Error::InvalidMean(format!("{} needs field \"generator\"", j.family))
            })
        };
        let mean = match j.family.as_str() {
            "arithmetic" => MeanHandle::arithmetic(),
            "min" => MeanHandle::min(),
            "max" => MeanHandle::max(),
            "geometric" => MeanHandle::geometric(),
            "power" => MeanHandle::power(need(j.p, "p")?)?,
            "gini" => MeanHandle::gini(need(j.p, "p")?, need(j.q, "q")?)?,
            "gini21" => MeanHandle::gini21(),
            "qa" => MeanHandle::quasi_arithmetic(parse_generator(&generator()?)?),
            "homdev" => MeanHandle::homogeneous_deviation(parse_homogeneous(&generator()?)?),
            "affine" => {
                let inner = j
                    .inner
                    .clone()
                    .ok_or_else(|| Error::InvalidMean("affine needs field \"inner\"".into()))?;
                MeanHandle::try_from(*inner)?.affine_conjugate(need(j.a, "a")?, need(j.b, "b")?)?
            }
            other => return Err(Error::InvalidMean(format!("unknown family {other:?}"))),
        };
        match j.domain {
            None => Ok(mean),
            Some([lower, upper]) => {
                let natural = mean.domain;
                // Without explicit flags an end is open only where the natural domain is.
                let [lc, uc] = j.closed.unwrap_or([
                    !(lower == natural.lower && !natural.lower_closed),
                    !(upper == natural.upper && !natural.upper_closed),
                ]);
                mean.with_domain(Interval::new(lower, upper, lc, uc)?)
            }
        }
    }
}

impl Serialize for MeanHandle {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MeanJson::try_from(self)
            .map_err(serde::ser::Error::custom)?
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MeanHandle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let j = MeanJson::deserialize(deserializer)?;
        MeanHandle::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axiom {
    Nullhomogeneity,
    Reduction,
    MeanValue,
    Elimination,
    Symmetry,
}

impl Axiom {
    pub const ALL: [Axiom; 5] = [
        Axiom::Nullhomogeneity,
        Axiom::Reduction,
        Axiom::MeanValue,
        Axiom::Elimination,
        Axiom::Symmetry,
    ];
}

/// Arguments of an axiom check, echoed into its residual.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AxiomInputs {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<usize>>,
}

/// `|left − right|` of one tested identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomResidual {
    pub axiom: Axiom,
    pub residual: f64,
    pub inputs: AxiomInputs,
}

/// `|M(x, w) − M(x, t·w)|`.
pub fn check_nullhomogeneity(
    mean: &MeanHandle,
    x: &[f64],
    w: &WeightVector,
    t: Scalar,
) -> Result<AxiomResidual> {
    let scaled = w.scale(t)?;
    let residual = (mean.evaluate(x, w)? - mean.evaluate(x, &scaled)?).abs();
    Ok(AxiomResidual {
        axiom: Axiom::Nullhomogeneity,
        residual,
        inputs: AxiomInputs {
            x: x.to_vec(),
            w: w.to_f64(),
            t: Some(t.to_f64()),
            ..Default::default()
        },
    })
}

/// `|M(x, λ + μ) − M(x ⊙ x, λ ⊙ μ)|` where `⊙` interleaves.
pub fn check_reduction(
    mean: &MeanHandle,
    x: &[f64],
    lambda: &[f64],
    mu: &[f64],
) -> Result<AxiomResidual> {
    if lambda.len() != x.len() || mu.len() != x.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: if lambda.len() != x.len() {
                lambda.len()
            } else {
                mu.len()
            },
        });
    }
    let sum: Vec<f64> = lambda.iter().zip(mu).map(|(a, b)| a + b).collect();
    let left = mean.eval(x, &sum)?;
    let right = mean.eval(&shuffle(x, x)?, &shuffle(lambda, mu)?)?;
    Ok(AxiomResidual {
        axiom: Axiom::Reduction,
        residual: (left - right).abs(),
        inputs: AxiomInputs {
            x: x.to_vec(),
            w: lambda.to_vec(),
            mu: Some(mu.to_vec()),
            ..Default::default()
        },
    })
}

/// Tolerance of the mean-value check: `max(1e-9·max|x_i|, 1e-12)`.
pub fn mean_value_tolerance(x: &[f64]) -> f64 {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    (1e-9 * scale).max(1e-12)
}

/// Distance of `M(x, w)` outside `[min x, max x]` (zero when inside).
pub fn mean_value_residual(
    mean: &MeanHandle,
    x: &[f64],
    w: &WeightVector,
) -> Result<AxiomResidual> {
    let y = mean.evaluate(x, w)?;
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let residual = (lo - y).max(y - hi).max(0.0);
    Ok(AxiomResidual {
        axiom: Axiom::MeanValue,
        residual,
        inputs: AxiomInputs {
            x: x.to_vec(),
            w: w.to_f64(),
            ..Default::default()
        },
    })
}

/// Whether `min x − tol ≤ M(x, w) ≤ max x + tol` with [`mean_value_tolerance`].
pub fn check_mean_value(mean: &MeanHandle, x: &[f64], w: &WeightVector) -> Result<bool> {
    Ok(mean_value_residual(mean, x, w)?.residual <= mean_value_tolerance(x))
}

/// `|M(x, w) − M(x without x_j, w without w_j)|` for a zero weight `w_j`.
///
/// `j` is 1-based, matching `λ_j`.
pub fn check_elimination(
    mean: &MeanHandle,
    x: &[f64],
    w: &WeightVector,
    j: usize,
) -> Result<AxiomResidual> {
    let wf = w.to_f64();
    if x.len() != wf.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: wf.len(),
        });
    }
    if j == 0 || j > wf.len() {
        return Err(Error::IndexOutOfRange {
            index: j,
            len: wf.len(),
        });
    }
    if wf[j - 1] != 0.0 {
        return Err(Error::IndexNotZeroWeighted(j));
    }
    let full = mean.eval(x, &wf)?;
    let (xr, wr): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(&wf)
        .enumerate()
        .filter(|&(i, _)| i != j - 1)
        .map(|(_, (&a, &l))| (a, l))
        .unzip();
    let reduced = mean.eval(&xr, &wr)?;
    Ok(AxiomResidual {
        axiom: Axiom::Elimination,
        residual: (full - reduced).abs(),
        inputs: AxiomInputs {
            x: x.to_vec(),
            w: wf,
            index: Some(j),
            ..Default::default()
        },
    })
}

/// `|M(x, w) − M(x∘σ, w∘σ)|` for a permutation `σ` of `0..n`.
pub fn check_symmetry(
    mean: &MeanHandle,
    x: &[f64],
    w: &WeightVector,
    perm: &[usize],
) -> Result<AxiomResidual> {
    let wf = w.to_f64();
    let n = x.len();
    if perm.len() != n || wf.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: if perm.len() != n {
                perm.len()
            } else {
                wf.len()
            },
        });
    }
    let mut seen = vec![false; n];
    for &i in perm {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidArgument(format!(
                "{perm:?} is not a permutation of 0..{n}"
            )));
        }
    }
    let xp: Vec<f64> = perm.iter().map(|&i| x[i]).collect();
    let wp: Vec<f64> = perm.iter().map(|&i| wf[i]).collect();
    let residual = (mean.eval(x, &wf)? - mean.eval(&xp, &wp)?).abs();
    Ok(AxiomResidual {
        axiom: Axiom::Symmetry,
        residual,
        inputs: AxiomInputs {
            x: x.to_vec(),
            w: wf,
            permutation: Some(perm.to_vec()),
            ..Default::default()
        },
    })
}

/// Evaluates a symmetric, repetition-invariant mean `base` on the multiset in
/// which `x_i` appears `λ_i` times.
///
/// Weights are divided by their gcd first; the expanded length must not exceed
/// `cap`.
pub fn weighted_from_repetition_invariant<F>(
    base: F,
    x: &[f64],
    w: &WeightVector,
    cap: usize,
) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let counts = w.as_integers()?;
    if counts.len() != x.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: counts.len(),
        });
    }
    let g = counts.iter().fold(0u64, |g, &c| gcd_u64(g, c));
    let total = counts
        .iter()
        .try_fold(0u64, |acc, &c| acc.checked_add(c / g))
        .ok_or(Error::Overflow("repetition expansion"))?;
    if total > cap as u64 {
        return Err(Error::Overflow("repetition expansion"));
    }
    let mut expanded = Vec::with_capacity(total as usize);
    for (&v, &c) in x.iter().zip(&counts) {
        expanded.extend(std::iter::repeat(v).take((c / g) as usize));
    }
    Ok(base(&expanded))
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
