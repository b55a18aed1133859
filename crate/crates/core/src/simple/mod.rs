//! Exact rational step functions on intervals and rectangles.
//!
//! Geometry (endpoints, lengths, proportions) is exact; function values are
//! floats and only meet the weights when a mean is evaluated.

mod proof;
mod proportional;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use proof::{build_proof_function, verify_proof_construction, ProofCheck};
pub use proportional::{
    proportional_rows, proportional_set, verify_proportionality, Axis, ProportionalSet,
    ProportionalityReport, SliceFailure,
};

use crate::error::{Error, Result};
use crate::means::MeanHandle;
use crate::rational::Rational;

/// Half-open interval `[lower, upper)` with rational endpoints.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[Rational; 2]", into = "[Rational; 2]")]
pub struct QInterval {
    lower: Rational,
    upper: Rational,
}

impl QInterval {
    pub fn new(lower: Rational, upper: Rational) -> Result<Self> {
        if lower >= upper {
            return Err(Error::InvalidInterval(format!(
                "[{lower}, {upper}) is empty"
            )));
        }
        Ok(QInterval { lower, upper })
    }

    pub fn from_integers(lower: i64, upper: i64) -> Result<Self> {
        Self::new(Rational::integer(lower), Rational::integer(upper))
    }

    pub fn lower(&self) -> Rational {
        self.lower
    }

    pub fn upper(&self) -> Rational {
        self.upper
    }

    pub fn length(&self) -> Result<Rational> {
        self.upper.checked_sub(self.lower)
    }

    pub fn contains(&self, t: Rational) -> bool {
        self.lower <= t && t < self.upper
    }

    pub fn contains_interval(&self, other: &QInterval) -> bool {
        self.lower <= other.lower && other.upper <= self.upper
    }
}

impl TryFrom<[Rational; 2]> for QInterval {
    type Error = Error;

    fn try_from([a, b]: [Rational; 2]) -> Result<Self> {
        QInterval::new(a, b)
    }
}

impl From<QInterval> for [Rational; 2] {
    fn from(i: QInterval) -> Self {
        [i.lower, i.upper]
    }
}

impl fmt::Debug for QInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.lower, self.upper)
    }
}

impl fmt::Display for QInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// `x × y` for two rational intervals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QRectangle {
    pub x: QInterval,
    pub y: QInterval,
}

impl QRectangle {
    pub fn new(x: QInterval, y: QInterval) -> Self {
        QRectangle { x, y }
    }

    /// `[a, b) × [c, d)`.
    pub fn from_bounds(a: Rational, b: Rational, c: Rational, d: Rational) -> Result<Self> {
        Ok(QRectangle {
            x: QInterval::new(a, b)?,
            y: QInterval::new(c, d)?,
        })
    }

    /// `[a, b) × [c, d)` for bounds already known to satisfy `a < b`, `c < d`.
    pub(crate) fn from_ordered(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        debug_assert!(a < b && c < d);
        QRectangle {
            x: QInterval { lower: a, upper: b },
            y: QInterval { lower: c, upper: d },
        }
    }

    pub fn area(&self) -> Result<Rational> {
        self.x.length()?.checked_mul(self.y.length()?)
    }

    pub fn contains_rect(&self, other: &QRectangle) -> bool {
        self.x.contains_interval(&other.x) && self.y.contains_interval(&other.y)
    }

    /// Whether the interiors meet.
    pub fn overlaps(&self, other: &QRectangle) -> bool {
        self.x.lower < other.x.upper
            && other.x.lower < self.x.upper
            && self.y.lower < other.y.upper
            && other.y.lower < self.y.upper
    }
}

/// A step function on an interval: consecutive pieces with float values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(QInterval, f64)>", into = "Vec<(QInterval, f64)>")]
pub struct SimpleFunction1D {
    pieces: Vec<(QInterval, f64)>,
}

impl SimpleFunction1D {
    /// Requires nonempty, finite-valued pieces with `sup D_i = inf D_{i+1}`.
    pub fn new(pieces: Vec<(QInterval, f64)>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::Empty);
        }
        if let Some((_, v)) = pieces.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite(v.to_string()));
        }
        for pair in pieces.windows(2) {
            if pair[0].0.upper != pair[1].0.lower {
                return Err(Error::InvalidPartition(format!(
                    "{} is not followed by an adjacent piece ({})",
                    pair[0].0, pair[1].0
                )));
            }
        }
        Ok(SimpleFunction1D { pieces })
    }

    pub fn pieces(&self) -> &[(QInterval, f64)] {
        &self.pieces
    }

    pub fn domain(&self) -> QInterval {
        QInterval {
            lower: self.pieces[0].0.lower,
            upper: self.pieces[self.pieces.len() - 1].0.upper,
        }
    }

    /// Values and piece lengths as floats.
    pub fn values_and_weights(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut values = Vec::with_capacity(self.pieces.len());
        let mut weights = Vec::with_capacity(self.pieces.len());
        for (d, v) in &self.pieces {
            values.push(*v);
            weights.push(d.length()?.to_f64());
        }
        Ok((values, weights))
    }

    /// Splits the piece at `index` at an interior point `t`.
    pub fn split_piece(&self, index: usize, t: Rational) -> Result<SimpleFunction1D> {
        let (d, v) = *self.pieces.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: self.pieces.len(),
        })?;
        let left = QInterval::new(d.lower, t)?;
        let right = QInterval::new(t, d.upper)?;
        let mut pieces = self.pieces.clone();
        pieces.splice(index..=index, [(left, v), (right, v)]);
        SimpleFunction1D::new(pieces)
    }
}

impl TryFrom<Vec<(QInterval, f64)>> for SimpleFunction1D {
    type Error = Error;

    fn try_from(pieces: Vec<(QInterval, f64)>) -> Result<Self> {
        SimpleFunction1D::new(pieces)
    }
}

impl From<SimpleFunction1D> for Vec<(QInterval, f64)> {
    fn from(f: SimpleFunction1D) -> Self {
        f.pieces
    }
}

/// The M-integral: `M((f|D_1, …, f|D_n), (|D_1|, …, |D_n|))`.
pub fn m_integral(mean: &MeanHandle, f: &SimpleFunction1D) -> Result<f64> {
    let (values, weights) = f.values_and_weights()?;
    mean.eval(&values, &weights)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece2D {
    #[serde(flatten)]
    pub rect: QRectangle,
    pub value: f64,
}

/// A step function on a rectangle, constant on each rectangle of a partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFunction2D")]
pub struct SimpleFunction2D {
    domain: QRectangle,
    pieces: Vec<Piece2D>,
}

#[derive(Deserialize)]
struct RawFunction2D {
    domain: QRectangle,
    pieces: Vec<Piece2D>,
}

impl TryFrom<RawFunction2D> for SimpleFunction2D {
    type Error = Error;

    fn try_from(raw: RawFunction2D) -> Result<Self> {
        SimpleFunction2D::new(raw.domain, raw.pieces)
    }
}

/// Sorted, deduplicated endpoints.
fn breakpoints<I: IntoIterator<Item = Rational>>(it: I) -> Vec<Rational> {
    let mut v: Vec<Rational> = it.into_iter().collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Index range of the grid cells an interval covers; both endpoints must be breakpoints.
fn cell_range(bps: &[Rational], d: &QInterval) -> std::ops::Range<usize> {
    let lo = bps
        .binary_search(&d.lower)
        .expect("lower endpoint is a breakpoint");
    let hi = bps
        .binary_search(&d.upper)
        .expect("upper endpoint is a breakpoint");
    lo..hi
}

/// Intervals between consecutive breakpoints.
fn cells(bps: &[Rational]) -> Vec<QInterval> {
    bps.windows(2)
        .map(|p| QInterval {
            lower: p[0],
            upper: p[1],
        })
        .collect()
}

impl SimpleFunction2D {
    /// Validates that the pieces lie in `domain`, are pairwise disjoint and
    /// cover it, by counting coverage on the grid of all breakpoints.
    pub fn new(domain: QRectangle, pieces: Vec<Piece2D>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::Empty);
        }
        for p in &pieces {
            if !p.value.is_finite() {
                return Err(Error::NonFinite(p.value.to_string()));
            }
            if !domain.contains_rect(&p.rect) {
                return Err(Error::InvalidPartition(format!(
                    "piece {:?} leaves the domain {:?}",
                    p.rect, domain
                )));
            }
        }
        let f = SimpleFunction2D { domain, pieces };
        let xs = f.x_breakpoints();
        let ys = f.y_breakpoints();
        let (nx, ny) = (xs.len() - 1, ys.len() - 1);
        let mut count = vec![0u32; nx * ny];
        for (idx, p) in f.pieces.iter().enumerate() {
            let ry = cell_range(&ys, &p.rect.y);
            for i in cell_range(&xs, &p.rect.x) {
                for c in &mut count[i * ny + ry.start..i * ny + ry.end] {
                    *c += 1;
                    if *c > 1 {
                        return Err(Error::InvalidPartition(format!(
                            "piece {idx} overlaps another piece"
                        )));
                    }
                }
            }
        }
        if let Some(hole) = count.iter().position(|&c| c == 0) {
            let (i, k) = (hole / ny, hole % ny);
            return Err(Error::InvalidPartition(format!(
                "cell [{}, {}) x [{}, {}) is not covered",
                xs[i],
                xs[i + 1],
                ys[k],
                ys[k + 1]
            )));
        }
        Ok(f)
    }

    pub fn domain(&self) -> QRectangle {
        self.domain
    }

    pub fn pieces(&self) -> &[Piece2D] {
        &self.pieces
    }

    fn x_breakpoints(&self) -> Vec<Rational> {
        breakpoints(
            self.pieces
                .iter()
                .flat_map(|p| [p.rect.x.lower, p.rect.x.upper])
                .chain([self.domain.x.lower, self.domain.x.upper]),
        )
    }

    fn y_breakpoints(&self) -> Vec<Rational> {
        breakpoints(
            self.pieces
                .iter()
                .flat_map(|p| [p.rect.y.lower, p.rect.y.upper])
                .chain([self.domain.y.lower, self.domain.y.upper]),
        )
    }

    /// Value at a point of the domain.
    pub fn value_at(&self, x: Rational, y: Rational) -> Option<f64> {
        self.pieces
            .iter()
            .find(|p| p.rect.x.contains(x) && p.rect.y.contains(y))
            .map(|p| p.value)
    }

    /// `y ↦ f(x, y)` for every `x` in each cell of the x-breakpoint grid.
    pub fn column_slices(&self) -> Result<Vec<(QInterval, SimpleFunction1D)>> {
        let xs = self.x_breakpoints();
        let mut lists: Vec<Vec<(QInterval, f64)>> = vec![Vec::new(); xs.len() - 1];
        for p in &self.pieces {
            for i in cell_range(&xs, &p.rect.x) {
                lists[i].push((p.rect.y, p.value));
            }
        }
        Self::assemble(cells(&xs), lists)
    }

    /// `x ↦ f(x, y)` for every `y` in each cell of the y-breakpoint grid.
    pub fn row_slices(&self) -> Result<Vec<(QInterval, SimpleFunction1D)>> {
        let ys = self.y_breakpoints();
        let mut lists: Vec<Vec<(QInterval, f64)>> = vec![Vec::new(); ys.len() - 1];
        for p in &self.pieces {
            for k in cell_range(&ys, &p.rect.y) {
                lists[k].push((p.rect.x, p.value));
            }
        }
        Self::assemble(cells(&ys), lists)
    }

    fn assemble(
        cells: Vec<QInterval>,
        lists: Vec<Vec<(QInterval, f64)>>,
    ) -> Result<Vec<(QInterval, SimpleFunction1D)>> {
        cells
            .into_iter()
            .zip(lists)
            .map(|(c, mut l)| {
                l.sort_unstable_by_key(|(d, _)| d.lower);
                Ok((c, SimpleFunction1D::new(l)?))
            })
            .collect()
    }
}

/// Both sides of the Jensen–Fubini inequality
/// `Ar_x(∮_M f(x, y) dy) ≤ ∮_M (Ar_x f(x, y)) dy`.
///
/// Jensen concave means satisfy `lhs ≤ rhs`, Jensen convex ones the reverse.
pub fn jensen_fubini_sides(mean: &MeanHandle, f: &SimpleFunction2D) -> Result<(f64, f64)> {
    let arithmetic = MeanHandle::arithmetic();
    let integrate = |slices: Vec<(QInterval, SimpleFunction1D)>,
                     inner: &MeanHandle,
                     outer: &MeanHandle|
     -> Result<f64> {
        let mut values = Vec::with_capacity(slices.len());
        let mut weights = Vec::with_capacity(slices.len());
        for (cell, g) in &slices {
            values.push(m_integral(inner, g)?);
            weights.push(cell.length()?.to_f64());
        }
        outer.eval(&values, &weights)
    };
    let lhs = integrate(f.column_slices()?, mean, &arithmetic)?;
    let rhs = integrate(f.row_slices()?, &arithmetic, mean)?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn iv(a: &str, b: &str) -> QInterval {
        QInterval::new(r(a), r(b)).unwrap()
    }

    fn rect(a: &str, b: &str, c: &str, d: &str) -> QRectangle {
        QRectangle::new(iv(a, b), iv(c, d))
    }

    fn m(id: &str) -> MeanHandle {
        id.parse().unwrap()
    }

    #[test]
    fn intervals() {
        assert!(QInterval::new(r("1/2"), r("1/2")).is_err());
        assert_eq!(iv("1/3", "1/2").length().unwrap(), r("1/6"));
        assert!(iv("0", "1").contains(r("0")) && !iv("0", "1").contains(r("1")));
        assert_eq!(rect("0", "1/2", "0", "1/3").area().unwrap(), r("1/6"));
        let json = serde_json::to_string(&iv("1/3", "2")).unwrap();
        assert_eq!(json, r#"["1/3","2"]"#);
        assert!(serde_json::from_str::<QInterval>(r#"["2","1"]"#).is_err());
    }

    #[test]
    fn one_dimensional_validation() {
        assert!(SimpleFunction1D::new(vec![(iv("0", "1"), 1.0), (iv("2", "3"), 1.0)]).is_err());
        assert!(SimpleFunction1D::new(vec![]).is_err());
        let f = SimpleFunction1D::new(vec![(iv("0", "1/2"), 1.0), (iv("1/2", "1"), 3.0)]).unwrap();
        assert_eq!(f.domain(), iv("0", "1"));
    }

    #[test]
    fn m_integral_examples() {
        let c = SimpleFunction1D::new(vec![(iv("0", "1"), 2.5)]).unwrap();
        for id in ["arithmetic", "power:0", "gini:2:1", "min", "qa:exp"] {
            assert_eq!(m_integral(&m(id), &c).unwrap(), 2.5);
        }
        let f = SimpleFunction1D::new(vec![(iv("0", "1/2"), 1.0), (iv("1/2", "1"), 3.0)]).unwrap();
        assert_eq!(m_integral(&m("arithmetic"), &f).unwrap(), 2.0);
        let g = SimpleFunction1D::new(vec![(iv("0", "1"), 1.0), (iv("1", "2"), 4.0)]).unwrap();
        assert!((m_integral(&m("power:0"), &g).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn two_dimensional_validation() {
        let dom = rect("0", "1", "0", "1");
        let halves = vec![
            Piece2D {
                rect: rect("0", "1/2", "0", "1"),
                value: 1.0,
            },
            Piece2D {
                rect: rect("1/2", "1", "0", "1"),
                value: 2.0,
            },
        ];
        assert!(SimpleFunction2D::new(dom, halves.clone()).is_ok());
        let overlap = vec![
            halves[0],
            Piece2D {
                rect: rect("1/3", "1", "0", "1"),
                value: 2.0,
            },
        ];
        assert!(matches!(
            SimpleFunction2D::new(dom, overlap),
            Err(Error::InvalidPartition(_))
        ));
        let hole = vec![
            halves[0],
            Piece2D {
                rect: rect("1/2", "1", "0", "1/2"),
                value: 2.0,
            },
        ];
        assert!(matches!(
            SimpleFunction2D::new(dom, hole),
            Err(Error::InvalidPartition(_))
        ));
        let outside = vec![Piece2D {
            rect: rect("0", "2", "0", "1"),
            value: 2.0,
        }];
        assert!(SimpleFunction2D::new(dom, outside).is_err());
    }

    #[test]
    fn json_shape() {
        let f = SimpleFunction2D::new(
            rect("0", "1", "0", "1/2"),
            vec![Piece2D {
                rect: rect("0", "1", "0", "1/2"),
                value: 3.0,
            }],
        )
        .unwrap();
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(
            json,
            r#"{"domain":{"x":["0","1"],"y":["0","1/2"]},"pieces":[{"x":["0","1"],"y":["0","1/2"],"value":3.0}]}"#
        );
        let back: SimpleFunction2D = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
        let broken = json.replace(
            r#""x":["0","1"],"y":["0","1/2"],"value""#,
            r#""x":["0","1/2"],"y":["0","1/2"],"value""#,
        );
        assert!(serde_json::from_str::<SimpleFunction2D>(&broken).is_err());
    }

    #[test]
    fn jensen_fubini_constant_and_arithmetic() {
        let dom = rect("0", "2", "0", "3");
        let c = SimpleFunction2D::new(
            dom,
            vec![Piece2D {
                rect: dom,
                value: 1.5,
            }],
        )
        .unwrap();
        assert_eq!(jensen_fubini_sides(&m("power:0"), &c).unwrap(), (1.5, 1.5));
        let f = SimpleFunction2D::new(
            dom,
            vec![
                Piece2D {
                    rect: rect("0", "1", "0", "1"),
                    value: 1.0,
                },
                Piece2D {
                    rect: rect("1", "2", "0", "1"),
                    value: 5.0,
                },
                Piece2D {
                    rect: rect("0", "1/2", "1", "3"),
                    value: 2.0,
                },
                Piece2D {
                    rect: rect("1/2", "2", "1", "3"),
                    value: 7.0,
                },
            ],
        )
        .unwrap();
        let (l, rr) = jensen_fubini_sides(&m("arithmetic"), &f).unwrap();
        assert!((l - rr).abs() < 1e-14);
        let (l, rr) = jensen_fubini_sides(&m("power:0"), &f).unwrap();
        assert!(l <= rr + 1e-12);
        let (l, rr) = jensen_fubini_sides(&m("gini:2:1"), &f).unwrap();
        assert!(l >= rr - 1e-12);
    }

    #[test]
    fn splitting_pieces_keeps_the_integral() {
        let f = SimpleFunction1D::new(vec![
            (iv("0", "1/3"), 1.0),
            (iv("1/3", "2"), 4.0),
            (iv("2", "5/2"), 9.0),
        ])
        .unwrap();
        let g = f.split_piece(1, r("1")).unwrap();
        assert_eq!(g.pieces().len(), 4);
        for id in [
            "arithmetic",
            "power:0",
            "power:-1",
            "gini:2:1",
            "qa:log",
            "homdev:log",
        ] {
            let a = m_integral(&m(id), &f).unwrap();
            let b = m_integral(&m(id), &g).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs(), "{id}: {a} vs {b}");
        }
        assert!(f.split_piece(1, r("2")).is_err());
    }
}
