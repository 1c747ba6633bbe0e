//! Continuous piecewise-linear self-maps of [0,1] with nonzero slopes.

use std::fmt;

use crate::error::{Error, MapError, Result};
use crate::interval_set::{Interval, IntervalSet};
use crate::rat::Rat;
use crate::Limits;

/// A continuous piecewise-affine map of [0,1] given by its breakpoints.
///
/// The representation is canonical: `xs` starts at 0, ends at 1 and is
/// strictly increasing, every `ys` value lies in [0,1], no segment is flat,
/// and no interior breakpoint has collinear neighbours. Equal maps therefore
/// have equal breakpoint lists.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PLMap {
    xs: Vec<Rat>,
    ys: Vec<Rat>,
    // derived from xs and ys
    slopes: Vec<Rat>,
}

impl PLMap {
    pub fn new(xs: Vec<Rat>, ys: Vec<Rat>) -> Result<Self, MapError> {
        if xs.len() != ys.len() {
            return Err(MapError::LengthMismatch { xs: xs.len(), ys: ys.len() });
        }
        if xs.len() < 2 {
            return Err(MapError::TooFewPoints);
        }
        if !xs[0].is_zero() {
            return Err(MapError::BadStart(xs[0].clone()));
        }
        for i in 1..xs.len() {
            if xs[i] <= xs[i - 1] {
                return Err(MapError::NotIncreasing { index: i, x: xs[i].clone() });
            }
        }
        let last = xs.len() - 1;
        if xs[last] != Rat::one() {
            return Err(MapError::BadEnd(xs[last].clone()));
        }
        for (i, y) in ys.iter().enumerate() {
            if !y.in_unit() {
                return Err(MapError::OutOfRange { index: i, y: y.clone() });
            }
        }
        for i in 0..last {
            if ys[i] == ys[i + 1] {
                return Err(MapError::ZeroSlope { index: i, y: ys[i].clone() });
            }
        }
        Ok(Self::canonical(xs, ys))
    }

    pub fn from_points(points: Vec<(Rat, Rat)>) -> Result<Self, MapError> {
        let (xs, ys) = points.into_iter().unzip();
        PLMap::new(xs, ys)
    }

    // Drops interior breakpoints whose neighbouring segments are collinear.
    fn canonical(xs: Vec<Rat>, ys: Vec<Rat>) -> Self {
        let n = xs.len();
        let mut out_x: Vec<Rat> = Vec::with_capacity(n);
        let mut out_y: Vec<Rat> = Vec::with_capacity(n);
        let mut slopes: Vec<Rat> = Vec::with_capacity(n);
        for (x, y) in xs.into_iter().zip(ys) {
            if let (Some(px), Some(py)) = (out_x.last(), out_y.last()) {
                let s_new = (&y - py) / (&x - px);
                if slopes.last() == Some(&s_new) {
                    // collinear: the merged segment keeps the same slope
                    out_x.pop();
                    out_y.pop();
                } else {
                    slopes.push(s_new);
                }
            }
            out_x.push(x);
            out_y.push(y);
        }
        PLMap { xs: out_x, ys: out_y, slopes }
    }

    // For breakpoint lists already known to be valid and canonical.
    fn assemble(xs: Vec<Rat>, ys: Vec<Rat>) -> Self {
        let slopes = xs.windows(2).zip(ys.windows(2)).map(|(x, y)| (&y[1] - &y[0]) / (&x[1] - &x[0])).collect();
        PLMap { xs, ys, slopes }
    }

    pub fn identity() -> Self {
        Self::assemble(vec![Rat::zero(), Rat::one()], vec![Rat::zero(), Rat::one()])
    }

    /// `x ↦ 1 − x`.
    pub fn flip() -> Self {
        Self::assemble(vec![Rat::zero(), Rat::one()], vec![Rat::one(), Rat::zero()])
    }

    /// The full tent map, slopes ±2.
    pub fn tent() -> Self {
        Self::zigzag(2)
    }

    /// The `m`-lap uniform zigzag starting at (0,0), all slopes ±m.
    pub fn zigzag(m: u32) -> Self {
        assert!(m >= 1, "zigzag needs at least one lap");
        let m = m as i64;
        let xs = (0..=m).map(|k| Rat::new(k, m)).collect();
        let ys = (0..=m).map(|k| Rat::from_int(k % 2)).collect();
        Self::assemble(xs, ys)
    }

    /// The five-breakpoint skeleton (0,1/3),(1/4,1),(2/3,1/3),(5/6,0),(1,1/3).
    pub fn skeleton() -> Self {
        let pts = [(0, 1, 1, 3), (1, 4, 1, 1), (2, 3, 1, 3), (5, 6, 0, 1), (1, 1, 1, 3)];
        let (xs, ys) = pts.iter().map(|&(a, b, c, d)| (Rat::new(a, b), Rat::new(c, d))).unzip();
        PLMap::new(xs, ys).expect("skeleton is a valid map")
    }

    pub fn xs(&self) -> &[Rat] {
        &self.xs
    }

    pub fn ys(&self) -> &[Rat] {
        &self.ys
    }

    pub fn points(&self) -> impl Iterator<Item = (&Rat, &Rat)> {
        self.xs.iter().zip(self.ys.iter())
    }

    /// Number of affine pieces.
    pub fn segment_count(&self) -> usize {
        self.xs.len() - 1
    }

    /// Number of maximal intervals of monotonicity.
    pub fn lap_count(&self) -> usize {
        1 + (1..self.segment_count()).filter(|&i| self.increasing(i - 1) != self.increasing(i)).count()
    }

    pub fn slope(&self, segment: usize) -> Rat {
        self.slopes[segment].clone()
    }

    pub fn slopes(&self) -> Vec<Rat> {
        self.slopes.clone()
    }

    pub fn increasing(&self, segment: usize) -> bool {
        self.ys[segment + 1] > self.ys[segment]
    }

    pub fn min_abs_slope(&self) -> Rat {
        self.slopes.iter().map(Rat::abs).min().expect("at least one segment")
    }

    /// Index of a segment containing `x` (the left one at interior breakpoints).
    pub fn segment_of(&self, x: &Rat) -> usize {
        let idx = self.xs.partition_point(|b| b < x);
        idx.saturating_sub(1).min(self.segment_count() - 1)
    }

    pub fn evaluate(&self, x: &Rat) -> Result<Rat> {
        if !x.in_unit() {
            return Err(Error::Domain(x.clone()));
        }
        Ok(self.eval(x))
    }

    /// Evaluation without the domain check; `x` must lie in [0,1].
    pub(crate) fn eval(&self, x: &Rat) -> Rat {
        let i = self.segment_of(x);
        self.eval_on(i, x)
    }

    /// The affine extension of segment `i` evaluated at `x`.
    pub(crate) fn eval_on(&self, i: usize, x: &Rat) -> Rat {
        if x == &self.xs[i] {
            return self.ys[i].clone();
        }
        if x == &self.xs[i + 1] {
            return self.ys[i + 1].clone();
        }
        &self.ys[i] + &self.slopes[i] * (x - &self.xs[i])
    }

    /// The point of segment `i` where the map takes value `y` (`y` must lie
    /// in the segment's closed range).
    pub(crate) fn solve_on(&self, i: usize, y: &Rat) -> Rat {
        if y == &self.ys[i] {
            return self.xs[i].clone();
        }
        if y == &self.ys[i + 1] {
            return self.xs[i + 1].clone();
        }
        // x0 + (y − y0)/s as one fraction, reduced once
        let (x0, y0, s) = (&self.xs[i], &self.ys[i], &self.slopes[i]);
        let dy_n = y.numer() * y0.denom() - y0.numer() * y.denom();
        let num = dy_n * s.denom();
        let den = y.denom() * y0.denom() * s.numer();
        Rat::new(x0.numer() * &den + num * x0.denom(), x0.denom() * den)
    }

    fn segment_range(&self, i: usize) -> (&Rat, &Rat) {
        let (a, b) = (&self.ys[i], &self.ys[i + 1]);
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// `self ∘ inner` under the default limits.
    pub fn compose(&self, inner: &PLMap) -> Result<PLMap> {
        compose(self, inner)
    }

    /// `x ↦ 1 − f(1 − x)`.
    pub fn flip_conjugate(&self) -> PLMap {
        let xs = self.xs.iter().rev().map(|x| Rat::one() - x).collect();
        let ys = self.ys.iter().rev().map(|y| Rat::one() - y).collect();
        Self::assemble(xs, ys)
    }
}

impl fmt::Debug for PLMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self.points().map(|(x, y)| format!("({x},{y})")).collect();
        write!(f, "PLMap[{}]", pts.join(","))
    }
}

/// Breakpoints of `outer` lying strictly between `lo` and `hi`, ascending.
fn interior_breakpoints<'a>(outer: &'a PLMap, lo: &Rat, hi: &Rat) -> &'a [Rat] {
    let start = outer.xs.partition_point(|b| b <= lo);
    let end = outer.xs.partition_point(|b| b < hi);
    if start >= end {
        &[]
    } else {
        &outer.xs[start..end]
    }
}

pub fn compose(outer: &PLMap, inner: &PLMap) -> Result<PLMap> {
    compose_limited(outer, inner, &Limits::default())
}

/// `outer ∘ inner`. The breakpoints of the result are those of `inner`
/// together with the `inner`-preimages of the breakpoints of `outer`.
pub fn compose_limited(outer: &PLMap, inner: &PLMap, limits: &Limits) -> Result<PLMap> {
    let pieces = composed_piece_count(outer, &inner.xs, &inner.ys);
    if pieces > limits.lap_budget {
        return Err(Error::Budget { what: "lap", reached: pieces, limit: limits.lap_budget });
    }
    let mut xs = Vec::with_capacity(pieces + 1);
    let mut ys = Vec::with_capacity(pieces + 1);
    compose_polyline(outer, &inner.xs, &inner.ys, &mut xs, &mut ys);
    Ok(PLMap::new(xs, ys)?)
}

/// Number of affine pieces of `outer ∘ p` for the polyline `p` through
/// `(xs[k], ys[k])`.
pub(crate) fn composed_piece_count(outer: &PLMap, xs: &[Rat], ys: &[Rat]) -> usize {
    (0..xs.len() - 1)
        .map(|i| {
            let (lo, hi) = if ys[i] <= ys[i + 1] { (&ys[i], &ys[i + 1]) } else { (&ys[i + 1], &ys[i]) };
            1 + interior_breakpoints(outer, lo, hi).len()
        })
        .sum()
}

/// Appends the vertices of `outer ∘ p` to `out_x`/`out_y`, where `p` is the
/// polyline through `(xs[k], ys[k])` with values in [0,1] and no flat piece.
pub(crate) fn compose_polyline(outer: &PLMap, xs: &[Rat], ys: &[Rat], out_x: &mut Vec<Rat>, out_y: &mut Vec<Rat>) {
    out_x.push(xs[0].clone());
    out_y.push(outer.eval(&ys[0]));
    for i in 0..xs.len() - 1 {
        let increasing = ys[i] < ys[i + 1];
        let (lo, hi) = if increasing { (&ys[i], &ys[i + 1]) } else { (&ys[i + 1], &ys[i]) };
        let cuts = interior_breakpoints(outer, lo, hi);
        let slope = (&ys[i + 1] - &ys[i]) / (&xs[i + 1] - &xs[i]);
        let mut push_cut = |c: &Rat| {
            let j = outer.xs.binary_search(c).expect("cut is a breakpoint of outer");
            out_x.push(&xs[i] + (c - &ys[i]) / &slope);
            out_y.push(outer.ys[j].clone());
        };
        if increasing {
            cuts.iter().for_each(&mut push_cut);
        } else {
            cuts.iter().rev().for_each(&mut push_cut);
        }
        out_x.push(xs[i + 1].clone());
        out_y.push(outer.eval(&ys[i + 1]));
    }
}

pub fn iterate(f: &PLMap, k: u32) -> Result<PLMap> {
    iterate_limited(f, k, &Limits::default())
}

/// The `k`-fold composite `f ∘ … ∘ f`.
pub fn iterate_limited(f: &PLMap, k: u32, limits: &Limits) -> Result<PLMap> {
    if k == 0 {
        return Err(Error::Precondition("iterate needs k >= 1".into()));
    }
    let mut acc = f.clone();
    for _ in 1..k {
        acc = compose_limited(f, &acc, limits)?;
    }
    Ok(acc)
}

/// All solutions of `f(x) = y`, each with the slope of a segment containing
/// it. A solution at an interior breakpoint is reported once, with the slope
/// of its left segment.
pub fn preimage_point(f: &PLMap, y: &Rat) -> Vec<(Rat, Rat)> {
    let mut out: Vec<(Rat, Rat)> = Vec::new();
    for i in 0..f.segment_count() {
        let (lo, hi) = f.segment_range(i);
        if y < lo || y > hi {
            continue;
        }
        let x = f.solve_on(i, y);
        if out.last().is_some_and(|(px, _)| *px == x) {
            continue;
        }
        out.push((x, f.slope(i)));
    }
    out
}

/// Exact `f⁻¹(J)` for a closed interval `J`.
pub fn preimage_interval(f: &PLMap, j: &Interval) -> IntervalSet {
    // pieces arrive in increasing x order and can only touch at breakpoints
    let mut parts: Vec<Interval> = Vec::new();
    for i in 0..f.segment_count() {
        let (lo, hi) = f.segment_range(i);
        if hi < &j.lo || lo > &j.hi {
            continue;
        }
        let piece = if &j.lo <= lo && hi <= &j.hi {
            Interval::new(f.xs[i].clone(), f.xs[i + 1].clone())
        } else {
            let (xa, xb) = (f.solve_on(i, lo.max_ref(&j.lo)), f.solve_on(i, hi.min_ref(&j.hi)));
            if xa <= xb {
                Interval::new(xa, xb)
            } else {
                Interval::new(xb, xa)
            }
        };
        match parts.last_mut() {
            Some(last) if last.hi == piece.lo => last.hi = piece.hi,
            _ => parts.push(piece),
        }
    }
    IntervalSet::from_intervals(parts)
}

/// Values of `f` at its breakpoints (including 0 and 1), sorted and
/// deduplicated.
pub fn determining_values(f: &PLMap) -> Vec<Rat> {
    let mut v = f.ys.clone();
    v.sort();
    v.dedup();
    v
}

/// Union of both breakpoint sets, sorted.
pub fn merged_breakpoints(f: &PLMap, g: &PLMap) -> Vec<Rat> {
    let mut v: Vec<Rat> = Vec::with_capacity(f.xs.len() + g.xs.len());
    let (mut i, mut j) = (0, 0);
    while i < f.xs.len() || j < g.xs.len() {
        let next = match (f.xs.get(i), g.xs.get(j)) {
            (Some(a), Some(b)) if a == b => {
                i += 1;
                j += 1;
                a
            }
            (Some(a), Some(b)) if a < b => {
                i += 1;
                a
            }
            (Some(a), None) => {
                i += 1;
                a
            }
            (_, Some(b)) => {
                j += 1;
                b
            }
            (None, None) => unreachable!(),
        };
        v.push(next.clone());
    }
    v
}

/// The sup metric `ρ(f, g) = max |f − g|`, attained on the merged breakpoints.
pub fn sup_distance(f: &PLMap, g: &PLMap) -> Rat {
    merged_breakpoints(f, g).iter().map(|x| (f.eval(x) - g.eval(x)).abs()).max().unwrap_or_else(Rat::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::r;

    fn map(points: &[(i64, i64, i64, i64)]) -> PLMap {
        PLMap::from_points(points.iter().map(|&(a, b, c, d)| (r(a, b), r(c, d))).collect()).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(PLMap::identity().evaluate(&r(1, 3)).unwrap(), r(1, 3));
        assert_eq!(PLMap::tent().evaluate(&r(1, 4)).unwrap(), r(1, 2));
        assert_eq!(PLMap::skeleton().evaluate(&r(1, 8)).unwrap(), r(2, 3));
        assert!(matches!(PLMap::tent().evaluate(&r(3, 2)), Err(Error::Domain(_))));
        assert!(matches!(PLMap::tent().evaluate(&r(-1, 2)), Err(Error::Domain(_))));
    }

    #[test]
    fn constructor_rejects_bad_input() {
        let e = PLMap::new(vec![r(0, 1), r(1, 2), r(1, 2), r(1, 1)], vec![r(0, 1), r(1, 1), r(0, 1), r(1, 1)]);
        assert_eq!(e, Err(MapError::NotIncreasing { index: 2, x: r(1, 2) }));
        let e = PLMap::new(vec![r(0, 1), r(1, 1)], vec![r(0, 1), r(3, 2)]);
        assert_eq!(e, Err(MapError::OutOfRange { index: 1, y: r(3, 2) }));
        let e = PLMap::new(vec![r(0, 1), r(1, 2), r(1, 1)], vec![r(0, 1), r(1, 1), r(1, 1)]);
        assert_eq!(e, Err(MapError::ZeroSlope { index: 1, y: r(1, 1) }));
        let e = PLMap::new(vec![r(1, 9), r(1, 1)], vec![r(0, 1), r(1, 1)]);
        assert!(matches!(e, Err(MapError::BadStart(_))));
        let e = PLMap::new(vec![r(0, 1), r(8, 9)], vec![r(0, 1), r(1, 1)]);
        assert!(matches!(e, Err(MapError::BadEnd(_))));
    }

    #[test]
    fn collinear_points_merge() {
        let f = map(&[(0, 1, 0, 1), (1, 3, 1, 3), (1, 1, 1, 1)]);
        assert_eq!(f, PLMap::identity());
    }

    #[test]
    fn compose_examples() {
        let t = PLMap::tent();
        let tt = t.compose(&t).unwrap();
        assert_eq!(tt, map(&[(0, 1, 0, 1), (1, 4, 1, 1), (1, 2, 0, 1), (3, 4, 1, 1), (1, 1, 0, 1)]));
        let b = PLMap::skeleton();
        assert_eq!(PLMap::identity().compose(&b).unwrap(), b);
        assert_eq!(b.compose(&PLMap::identity()).unwrap(), b);
    }

    #[test]
    fn compose_tent_zigzag3() {
        let t = PLMap::tent();
        let z3 = PLMap::zigzag(3);
        let h = t.compose(&z3).unwrap();
        assert_eq!(h.segment_count(), 6);
        assert_eq!(h.lap_count(), 6);
        assert!(h.slopes().iter().all(|s| s.abs() == r(6, 1)));
        // spot check against direct evaluation at rationals j/37
        for j in 0..=20 {
            let x = r(j * 37 % 41, 41);
            assert_eq!(h.eval(&x), t.eval(&z3.eval(&x)));
        }
    }

    #[test]
    fn iterate_examples() {
        assert_eq!(iterate(&PLMap::identity(), 5).unwrap(), PLMap::identity());
        let t = PLMap::tent();
        assert_eq!(iterate(&t, 2).unwrap(), t.compose(&t).unwrap());
        let t3 = iterate(&t, 3).unwrap();
        assert_eq!(t3.lap_count(), 8);
        assert!(t3.slopes().iter().all(|s| s.abs() == r(8, 1)));
        assert!(iterate(&t, 0).is_err());
    }

    #[test]
    fn iterate_budget_reports_reached_count() {
        let limits = Limits { lap_budget: 100, ..Limits::default() };
        match iterate_limited(&PLMap::tent(), 8, &limits) {
            Err(Error::Budget { what: "lap", reached: 128, limit: 100 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn preimage_point_examples() {
        let t = PLMap::tent();
        assert_eq!(preimage_point(&t, &r(1, 2)), vec![(r(1, 4), r(2, 1)), (r(3, 4), r(-2, 1))]);
        assert_eq!(preimage_point(&PLMap::identity(), &r(2, 7)), vec![(r(2, 7), r(1, 1))]);
        // local extremum: reported once, left segment
        assert_eq!(preimage_point(&t, &r(1, 1)), vec![(r(1, 2), r(2, 1))]);
        let b = PLMap::skeleton();
        let pre = preimage_point(&b, &r(1, 2));
        assert_eq!(pre.len(), 2);
        assert_eq!(pre[0].1, r(8, 3));
        assert_eq!(pre[1].1, r(-8, 5));
        for (x, _) in &pre {
            assert_eq!(b.eval(x), r(1, 2));
        }
    }

    #[test]
    fn preimage_interval_examples() {
        let t = PLMap::tent();
        let s = preimage_interval(&t, &Interval::new(r(0, 1), r(1, 2)));
        assert_eq!(
            s,
            IntervalSet::from_intervals(vec![Interval::new(r(0, 1), r(1, 4)), Interval::new(r(3, 4), r(1, 1))])
        );
        let j = Interval::new(r(1, 5), r(3, 7));
        assert_eq!(preimage_interval(&PLMap::identity(), &j), IntervalSet::from_intervals(vec![j]));
        let s = preimage_interval(&PLMap::skeleton(), &Interval::new(r(1, 3), r(1, 1)));
        assert_eq!(s, IntervalSet::from_intervals(vec![Interval::new(r(0, 1), r(2, 3)), Interval::point(r(1, 1))]));
        assert_eq!(s.measure(), r(2, 3));
    }

    #[test]
    fn determining_values_examples() {
        assert_eq!(determining_values(&PLMap::tent()), vec![r(0, 1), r(1, 1)]);
        assert_eq!(determining_values(&PLMap::skeleton()), vec![r(0, 1), r(1, 3), r(1, 1)]);
        let t = PLMap::tent();
        assert_eq!(determining_values(&t.compose(&t).unwrap()), vec![r(0, 1), r(1, 1)]);
    }

    #[test]
    fn sup_distance_examples() {
        let t = PLMap::tent();
        assert_eq!(sup_distance(&t, &t), r(0, 1));
        assert_eq!(sup_distance(&PLMap::identity(), &PLMap::flip()), r(1, 1));
        assert_eq!(sup_distance(&t, &t.compose(&t).unwrap()), r(1, 1));
    }
}
