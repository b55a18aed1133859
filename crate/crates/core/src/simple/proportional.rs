//! θ-proportional subsets of rational rectangles.
//!
//! For `θ = p/q` the unit square is cut into a `q × q` grid of cells
//! `H_{i,j} = [i/q, (i+1)/q) × [j/q, (j+1)/q)`, and column `i` keeps the cells
//! `j = i, …, i+p−1 (mod q)`. Every row and every column then holds exactly
//! `p` cells. The affine map `(t, s) ↦ ((1−t)a + tb, (1−s)c + sd)` carries the
//! set onto the host `[a, b) × [c, d)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{QInterval, QRectangle};
use crate::error::{Error, Result};
use crate::rational::{lcm_i64, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProportionalSet {
    rectangles: Vec<QRectangle>,
    theta: Rational,
    host: QRectangle,
}

fn check_theta(theta: Rational) -> Result<()> {
    if theta.is_negative() || theta > Rational::ONE {
        return Err(Error::ThetaOutOfRange(theta.to_string()));
    }
    Ok(())
}

impl ProportionalSet {
    /// An arbitrary candidate set; rectangles must lie in the host and be
    /// pairwise disjoint. Proportionality is not checked here.
    pub fn from_parts(
        host: QRectangle,
        theta: Rational,
        rectangles: Vec<QRectangle>,
    ) -> Result<Self> {
        check_theta(theta)?;
        for (i, r) in rectangles.iter().enumerate() {
            if !host.contains_rect(r) {
                return Err(Error::InvalidPartition(format!(
                    "{r:?} leaves the host {host:?}"
                )));
            }
            if let Some(k) = rectangles[..i].iter().position(|o| o.overlaps(r)) {
                return Err(Error::InvalidPartition(format!(
                    "rectangles {k} and {i} overlap"
                )));
            }
        }
        Ok(ProportionalSet {
            rectangles,
            theta,
            host,
        })
    }

    pub fn rectangles(&self) -> &[QRectangle] {
        &self.rectangles
    }

    pub fn theta(&self) -> Rational {
        self.theta
    }

    pub fn host(&self) -> QRectangle {
        self.host
    }
}

/// Images of the grid lines `k/q`, `k = 0..=q`, under `t ↦ (1−t)a + tb`.
fn grid_lines(d: &QInterval, q: i64) -> Result<Vec<Rational>> {
    let (a, b) = (d.lower(), d.upper());
    // ((q−k)·a + k·b)/q over the denominator q·den(a)·den(b)
    let an = a.numer() as i128 * b.denom() as i128;
    let bn = b.numer() as i128 * a.denom() as i128;
    let den = (q as i128)
        .checked_mul(a.denom() as i128 * b.denom() as i128)
        .ok_or(Error::Overflow("grid line"))?;
    (0..=q as i128)
        .map(|k| {
            let num = (q as i128 - k)
                .checked_mul(an)
                .zip(k.checked_mul(bn))
                .and_then(|(x, y)| x.checked_add(y))
                .ok_or(Error::Overflow("grid line"))?;
            Rational::from_i128(num, den, "grid line")
        })
        .collect()
}

fn split_theta(theta: Rational) -> Result<(i64, i64)> {
    check_theta(theta)?;
    Ok((theta.numer(), theta.denom()))
}

/// The θ-proportional subset of `host`: `p·q` grid cells for `θ = p/q` in
/// lowest terms.
pub fn proportional_set(host: QRectangle, theta: Rational) -> Result<ProportionalSet> {
    let (p, q) = split_theta(theta)?;
    let xs = grid_lines(&host.x, q)?;
    let ys = grid_lines(&host.y, q)?;
    let mut rectangles = Vec::with_capacity((p * q) as usize);
    for i in 0..q as usize {
        for jj in i..i + p as usize {
            let j = jj % q as usize;
            rectangles.push(QRectangle::from_ordered(xs[i], xs[i + 1], ys[j], ys[j + 1]));
        }
    }
    Ok(ProportionalSet {
        rectangles,
        theta,
        host,
    })
}

/// Linear pieces of the cyclic index run `start, start+1, …` of length `len` mod `q`.
fn cyclic_run(start: usize, len: usize, q: usize) -> Vec<(usize, usize)> {
    if len == 0 {
        Vec::new()
    } else if start + len <= q {
        vec![(start, start + len)]
    } else {
        vec![(start, q), (0, start + len - q)]
    }
}

/// The same θ-proportional set as [`proportional_set`] and its complement in
/// the host, merged row by row.
///
/// In grid row `r` the selected columns are the cyclic run `r−p+1, …, r`, so
/// each row contributes at most two rectangles to the set and two to the
/// complement.
pub fn proportional_rows(
    host: QRectangle,
    theta: Rational,
) -> Result<(Vec<QRectangle>, Vec<QRectangle>)> {
    let (p, q) = split_theta(theta)?;
    let (p, q) = (p as usize, q as usize);
    let xs = grid_lines(&host.x, q as i64)?;
    let ys = grid_lines(&host.y, q as i64)?;
    let mut set = Vec::new();
    let mut rest = Vec::new();
    for r in 0..q {
        let chosen = cyclic_run((r + q + 1 - p) % q, p, q);
        let others = cyclic_run((r + 1) % q, q - p, q);
        for (s, e) in chosen {
            set.push(QRectangle::from_ordered(xs[s], xs[e], ys[r], ys[r + 1]));
        }
        for (s, e) in others {
            rest.push(QRectangle::from_ordered(xs[s], xs[e], ys[r], ys[r + 1]));
        }
    }
    Ok((set, rest))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    /// Slices `{y : (x, y) ∈ H}` at fixed `x`.
    X,
    /// Slices `{x : (x, y) ∈ H}` at fixed `y`.
    Y,
}

/// A slice whose measure differs from `θ` times the host's side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceFailure {
    pub axis: Axis,
    /// The cell of fixed coordinates on which the slice measure is constant.
    pub cell: QInterval,
    /// `None` when the measure overflowed exact arithmetic.
    pub measure: Option<Rational>,
    pub expected: Rational,
}

impl fmt::Display for SliceFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let axis = match self.axis {
            Axis::X => "x",
            Axis::Y => "y",
        };
        match &self.measure {
            Some(m) => write!(
                f,
                "slice at {axis} in {} has measure {m}, expected {}",
                self.cell, self.expected
            ),
            None => write!(
                f,
                "slice at {axis} in {} overflowed, expected {}",
                self.cell, self.expected
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProportionalityReport {
    pub ok: bool,
    pub failure: Option<SliceFailure>,
}

/// Exact scalars used for slice accounting.
trait Exact: Copy + Ord {
    fn zero() -> Self;
    fn add(self, o: Self) -> Option<Self>;
    fn sub(self, o: Self) -> Option<Self>;
    fn mul_int(self, k: i64) -> Option<Self>;
}

impl Exact for i64 {
    fn zero() -> Self {
        0
    }
    fn add(self, o: Self) -> Option<Self> {
        self.checked_add(o)
    }
    fn sub(self, o: Self) -> Option<Self> {
        self.checked_sub(o)
    }
    fn mul_int(self, k: i64) -> Option<Self> {
        self.checked_mul(k)
    }
}

impl Exact for i128 {
    fn zero() -> Self {
        0
    }
    fn add(self, o: Self) -> Option<Self> {
        self.checked_add(o)
    }
    fn sub(self, o: Self) -> Option<Self> {
        self.checked_sub(o)
    }
    fn mul_int(self, k: i64) -> Option<Self> {
        self.checked_mul(k as i128)
    }
}

impl Exact for Rational {
    fn zero() -> Self {
        Rational::ZERO
    }
    fn add(self, o: Self) -> Option<Self> {
        self.checked_add(o).ok()
    }
    fn sub(self, o: Self) -> Option<Self> {
        self.checked_sub(o).ok()
    }
    fn mul_int(self, k: i64) -> Option<Self> {
        self.checked_mul(Rational::integer(k)).ok()
    }
}

/// `[x0, x1, y0, y1]` in some exact representation.
type Coords<T> = [T; 4];

/// One axis of the check. Slices at a fixed coordinate in `[f0, f1)` are
/// measured along `[m0, m1)`.
fn check_axis<T: Exact>(
    host: Coords<T>,
    rects: &[Coords<T>],
    (p, q): (i64, i64),
    axis: Axis,
    back: &dyn Fn(T) -> Option<Rational>,
) -> Option<SliceFailure> {
    let (f0, f1, m0, m1) = match axis {
        Axis::X => (0, 1, 2, 3),
        Axis::Y => (2, 3, 0, 1),
    };
    let side = host[m1].sub(host[m0]);
    let expected = side.and_then(|s| s.mul_int(p));
    let fail = |lo: T, hi: T, measure: Option<T>| {
        let expected = back(side?)?.checked_mul(Rational::new(p, q).ok()?).ok()?;
        Some(SliceFailure {
            axis,
            cell: QInterval::new(back(lo)?, back(hi)?).ok()?,
            measure: measure.and_then(back),
            expected,
        })
    };
    // Each rectangle adds its length on entry and removes it on exit; the
    // host bounds are zero events so that empty cells are visited too.
    let mut events: Vec<(T, T)> = Vec::with_capacity(2 * rects.len() + 2);
    events.push((host[f0], T::zero()));
    events.push((host[f1], T::zero()));
    for r in rects {
        match r[m1]
            .sub(r[m0])
            .and_then(|len| Some((len, T::zero().sub(len)?)))
        {
            Some((len, neg)) => {
                events.push((r[f0], len));
                events.push((r[f1], neg));
            }
            None => return fail(host[f0], host[f1], None),
        }
    }
    events.sort_unstable_by_key(|e| e.0);
    let mut acc = T::zero();
    let mut i = 0;
    while i < events.len() {
        let lo = events[i].0;
        while i < events.len() && events[i].0 == lo {
            match acc.add(events[i].1) {
                Some(a) => acc = a,
                None => return fail(host[f0], host[f1], None),
            }
            i += 1;
        }
        if lo < host[f0] || lo >= host[f1] || i == events.len() {
            continue;
        }
        let hi = events[i].0;
        // measure = θ·side  ⇔  q·measure = p·side
        match (acc.mul_int(q), expected) {
            (Some(lhs), Some(rhs)) if lhs == rhs => {}
            (Some(_), Some(_)) => return fail(lo, hi, Some(acc)),
            _ => return fail(lo, hi, None),
        }
    }
    None
}

/// Merges runs of consecutive rectangles that stack exactly, first along `y`
/// and then along `x`. The union and every slice measure are unchanged since
/// the rectangles are disjoint.
fn merge_runs(rects: &[QRectangle]) -> Vec<QRectangle> {
    let mut stacked: Vec<QRectangle> = Vec::with_capacity(rects.len());
    for r in rects {
        match stacked.last_mut() {
            Some(last) if last.x == r.x && last.y.upper == r.y.lower => last.y.upper = r.y.upper,
            _ => stacked.push(*r),
        }
    }
    let mut out: Vec<QRectangle> = Vec::with_capacity(stacked.len());
    for r in stacked {
        match out.last_mut() {
            Some(last) if last.y == r.y && last.x.upper == r.x.lower => last.x.upper = r.x.upper,
            _ => out.push(r),
        }
    }
    out
}

fn coords_rational(r: &QRectangle) -> Coords<Rational> {
    [r.x.lower(), r.x.upper(), r.y.lower(), r.y.upper()]
}

fn check_both<T: Exact>(
    host: Coords<T>,
    rects: &[Coords<T>],
    pq: (i64, i64),
    back: &dyn Fn(T) -> Option<Rational>,
) -> Option<SliceFailure> {
    check_axis(host, rects, pq, Axis::X, back)
        .or_else(|| check_axis(host, rects, pq, Axis::Y, back))
}

/// Exact check of both proportionality properties: for every `x` in the host,
/// `|{y : (x, y) ∈ H}| = θ·|E|`, and symmetrically in `y`.
///
/// Slices are constant between consecutive rectangle endpoints, so one test
/// per breakpoint cell decides each property. Coordinates are brought to a
/// common denominator when it fits in `i64`.
pub fn verify_proportionality(h: &ProportionalSet) -> ProportionalityReport {
    let pq = (h.theta.numer(), h.theta.denom());
    let host_r = coords_rational(&h.host);
    let merged = merge_runs(&h.rectangles);
    let common = std::iter::once(&h.host)
        .chain(&merged)
        .flat_map(|r| coords_rational(r).map(|c| c.denom()))
        .try_fold(1i64, lcm_i64);
    let failure = match common {
        Ok(l) => {
            let back = |v: i128| Rational::from_i128(v, l as i128, "slice measure").ok();
            // Most sets fit in i64; any failure there, overflow included, is
            // settled in i128.
            let narrow = |r: &QRectangle| -> Option<Coords<i64>> {
                let [a, b, c, d] = coords_rational(r).map(|c| c.numer().checked_mul(l / c.denom()));
                Some([a?, b?, c?, d?])
            };
            let rects: Option<Vec<Coords<i64>>> = merged.iter().map(narrow).collect();
            let back_narrow = |v: i64| back(v as i128);
            match (narrow(&h.host), rects) {
                (Some(host), Some(rects))
                    if check_both(host, &rects, pq, &back_narrow).is_none() =>
                {
                    None
                }
                _ => {
                    let scale = |c: Rational| c.numer() as i128 * (l / c.denom()) as i128;
                    let rects: Vec<Coords<i128>> = merged
                        .iter()
                        .map(|r| coords_rational(r).map(scale))
                        .collect();
                    check_both(host_r.map(scale), &rects, pq, &back)
                }
            }
        }
        Err(_) => {
            let rects: Vec<Coords<Rational>> = merged.iter().map(coords_rational).collect();
            check_both(host_r, &rects, pq, &|v| Some(v))
        }
    };
    ProportionalityReport {
        ok: failure.is_none(),
        failure,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn unit() -> QRectangle {
        QRectangle::from_bounds(r("0"), r("1"), r("0"), r("1")).unwrap()
    }

    #[test]
    fn half_on_unit_square() {
        let h = proportional_set(unit(), r("1/2")).unwrap();
        let expected = vec![
            QRectangle::from_bounds(r("0"), r("1/2"), r("0"), r("1/2")).unwrap(),
            QRectangle::from_bounds(r("1/2"), r("1"), r("1/2"), r("1")).unwrap(),
        ];
        assert_eq!(h.rectangles(), expected.as_slice());
        assert!(verify_proportionality(&h).ok);
    }

    #[test]
    fn extreme_thetas() {
        let empty = proportional_set(unit(), Rational::ZERO).unwrap();
        assert!(empty.rectangles().is_empty());
        assert!(verify_proportionality(&empty).ok);
        let full = proportional_set(unit(), Rational::ONE).unwrap();
        assert_eq!(full.rectangles(), &[unit()]);
        assert!(verify_proportionality(&full).ok);
        assert!(matches!(
            proportional_set(unit(), r("3/2")),
            Err(Error::ThetaOutOfRange(_))
        ));
        assert!(matches!(
            proportional_set(unit(), r("-1/2")),
            Err(Error::ThetaOutOfRange(_))
        ));
    }

    #[test]
    fn single_cell_is_not_half_proportional() {
        let cell = QRectangle::from_bounds(r("0"), r("1/2"), r("0"), r("1/2")).unwrap();
        let h = ProportionalSet::from_parts(unit(), r("1/2"), vec![cell]).unwrap();
        let report = verify_proportionality(&h);
        assert!(!report.ok);
        let failure = report.failure.unwrap();
        // The slices over [1/2, 1) are empty.
        assert_eq!(failure.axis, Axis::X);
        assert_eq!(failure.cell, QInterval::new(r("1/2"), r("1")).unwrap());
        assert_eq!(failure.measure, Some(Rational::ZERO));
        let only_y = check_axis(
            coords_rational(&unit()),
            &[coords_rational(&cell)],
            (1, 2),
            Axis::Y,
            &|v| Some(v),
        )
        .unwrap();
        assert_eq!(only_y.cell, QInterval::new(r("1/2"), r("1")).unwrap());
        assert_eq!(only_y.measure, Some(Rational::ZERO));
    }

    #[test]
    fn from_parts_rejects_overlap() {
        let a = QRectangle::from_bounds(r("0"), r("1/2"), r("0"), r("1/2")).unwrap();
        let b = QRectangle::from_bounds(r("1/4"), r("1"), r("1/4"), r("1")).unwrap();
        assert!(ProportionalSet::from_parts(unit(), r("1/2"), vec![a, b]).is_err());
    }

    #[test]
    fn rational_fallback_agrees() {
        // Denominators whose lcm exceeds i64 force the exact rational path.
        let host = QRectangle::from_bounds(
            Rational::new(1, 2147483647).unwrap(),
            Rational::new(3, 2147483629)
                .unwrap()
                .checked_add(Rational::ONE)
                .unwrap(),
            Rational::new(1, 1000003).unwrap(),
            Rational::new(7, 3).unwrap(),
        )
        .unwrap();
        let h = proportional_set(host, r("2/5")).unwrap();
        assert!(verify_proportionality(&h).ok);
        let mut broken = h.rectangles().to_vec();
        broken.pop();
        let h = ProportionalSet::from_parts(host, r("2/5"), broken).unwrap();
        assert!(!verify_proportionality(&h).ok);
    }

    fn host_strategy() -> impl Strategy<Value = QRectangle> {
        (
            -20i64..20,
            1i64..12,
            1i64..20,
            1i64..12,
            -20i64..20,
            1i64..12,
            1i64..20,
            1i64..12,
        )
            .prop_map(|(a, ad, w, wd, c, cd, h, hd)| {
                let a = Rational::new(a, ad).unwrap();
                let c = Rational::new(c, cd).unwrap();
                let b = a.checked_add(Rational::new(w, wd).unwrap()).unwrap();
                let d = c.checked_add(Rational::new(h, hd).unwrap()).unwrap();
                QRectangle::from_bounds(a, b, c, d).unwrap()
            })
    }

    proptest! {
        #[test]
        fn constructions_are_proportional(host in host_strategy(), q in 1i64..=50, p in 0i64..=50) {
            let theta = Rational::new(p % (q + 1), q).unwrap();
            let h = proportional_set(host, theta).unwrap();
            prop_assert!(verify_proportionality(&h).ok);
            prop_assert_eq!(h.rectangles().len() as i64, theta.numer() * theta.denom());
        }

        #[test]
        fn rows_partition_the_host(host in host_strategy(), q in 1i64..=30, p in 0i64..=30) {
            let theta = Rational::new(p % (q + 1), q).unwrap();
            let (set, rest) = proportional_rows(host, theta).unwrap();
            let rows = ProportionalSet::from_parts(host, theta, set.clone()).unwrap();
            prop_assert!(verify_proportionality(&rows).ok);
            // Same point set as the cell construction: equal area and no overlap with the complement.
            let area = |v: &[QRectangle]| Rational::sum(&v.iter().map(|r| r.area().unwrap()).collect::<Vec<_>>()).unwrap();
            let cells = proportional_set(host, theta).unwrap();
            prop_assert_eq!(area(&set), area(cells.rectangles()));
            for s in &set {
                prop_assert!(rest.iter().all(|o| !o.overlaps(s)));
            }
            let mut all = set.clone();
            all.extend(rest.iter().copied());
            prop_assert_eq!(area(&all), host.area().unwrap());
            prop_assert!(set.len() <= 2 * theta.denom() as usize);
        }
    }
}
