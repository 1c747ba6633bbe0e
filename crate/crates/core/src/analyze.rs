//! Level sets, the non-injectivity set `B₀`, and finite-scale difference
//! quotient diagnostics.

use crate::error::{Error, Result};
use crate::interval_set::{Interval, IntervalSet};
use crate::plmap::{determining_values, preimage_point, PLMap};
use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LevelCount {
    Finite(usize),
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSetReport {
    pub value: Rat,
    pub points: Vec<Rat>,
    /// Always empty for maps without flat pieces.
    pub intervals: IntervalSet,
    pub count: LevelCount,
}

pub fn level_set(f: &PLMap, c: &Rat) -> Result<LevelSetReport> {
    if !c.in_unit() {
        return Err(Error::Domain(c.clone()));
    }
    let points: Vec<Rat> = preimage_point(f, c).into_iter().map(|(x, _)| x).collect();
    let count = LevelCount::Finite(points.len());
    Ok(LevelSetReport { value: c.clone(), points, intervals: IntervalSet::empty(), count })
}

/// The values with at least two preimages.
///
/// Stored as a closed [`IntervalSet`] plus the finitely many points of that
/// closure that do not belong to the set (for the tent map, `[0,1]` with `1`
/// excluded).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct B0Set {
    pub closure: IntervalSet,
    pub excluded: Vec<Rat>,
}

impl B0Set {
    pub fn contains(&self, c: &Rat) -> bool {
        self.closure.contains(c) && self.excluded.binary_search(c).is_err()
    }

    pub fn measure(&self) -> Rat {
        self.closure.measure()
    }

    pub fn is_empty(&self) -> bool {
        self.closure.is_empty()
    }

    /// True when the set contains an interval of positive length.
    pub fn contains_interval(&self) -> bool {
        self.closure.has_interval()
    }
}

pub fn b0_set(f: &PLMap) -> B0Set {
    let dv = determining_values(f);
    let mut parts = Vec::new();
    let mut boundary_in = Vec::with_capacity(dv.len());
    for c in &dv {
        let inside = preimage_point(f, c).len() >= 2;
        if inside {
            parts.push(Interval::point(c.clone()));
        }
        boundary_in.push(inside);
    }
    for w in dv.windows(2) {
        if preimage_point(f, &w[0].midpoint(&w[1])).len() >= 2 {
            parts.push(Interval::new(w[0].clone(), w[1].clone()));
        }
    }
    let closure = IntervalSet::from_intervals(parts);
    let excluded = dv
        .iter()
        .zip(&boundary_in)
        .filter(|(c, inside)| !**inside && closure.contains(c))
        .map(|(c, _)| c.clone())
        .collect();
    B0Set { closure, excluded }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaleDiagnostics {
    pub x: Rat,
    pub r: Rat,
    pub max_dq: Rat,
    pub min_dq: Rat,
}

/// Difference quotient `(f(t) − f(x)) / (t − x)`.
pub(crate) fn dq(f: &PLMap, x: &Rat, fx: &Rat, t: &Rat) -> Rat {
    (f.eval(t) - fx) / (t - x)
}

/// Candidate comparison points for the quotient extremes over the punctured
/// window `[x − r, x + r] ∩ [0,1] \ {x}`: on each affine piece the quotient
/// is monotone in `t` (constant on the piece containing `x`), so extremes sit
/// at breakpoints, at the window ends, or are the one-sided slopes at `x`.
/// Returns the quotient values, nearest candidates first on each side.
pub(crate) fn dq_candidates(f: &PLMap, x: &Rat, r: &Rat) -> Vec<Rat> {
    let xs = f.xs();
    let fx = f.eval(x);
    let lo = if x > r { x - r } else { Rat::zero() };
    let hi = (x + r).min(Rat::one());
    let mut out = Vec::new();
    if *x > Rat::zero() {
        let left_seg = xs.partition_point(|b| b < x) - 1;
        out.push(f.slope(left_seg));
    }
    if *x < Rat::one() {
        let right_seg = xs.partition_point(|b| b <= x) - 1;
        out.push(f.slope(right_seg));
    }
    let first_right = xs.partition_point(|b| b <= x);
    let first_left_end = xs.partition_point(|b| b < x);
    for t in xs[first_right..].iter().take_while(|t| **t < hi) {
        out.push(dq(f, x, &fx, t));
    }
    for t in xs[..first_left_end].iter().rev().take_while(|t| **t > lo) {
        out.push(dq(f, x, &fx, t));
    }
    if hi > *x {
        out.push(dq(f, x, &fx, &hi));
    }
    if lo < *x {
        out.push(dq(f, x, &fx, &lo));
    }
    out
}

pub fn scale_diagnostics(f: &PLMap, x: &Rat, r: &Rat) -> Result<ScaleDiagnostics> {
    if !x.in_unit() {
        return Err(Error::Domain(x.clone()));
    }
    if !r.is_positive() {
        return Err(Error::Precondition(format!("scale r = {r} must be positive")));
    }
    let c = dq_candidates(f, x, r);
    let max_dq = c.iter().max().expect("nonempty").clone();
    let min_dq = c.iter().min().expect("nonempty").clone();
    Ok(ScaleDiagnostics { x: x.clone(), r: r.clone(), max_dq, min_dq })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::r;

    #[test]
    fn level_set_examples() {
        let t = PLMap::tent();
        assert_eq!(level_set(&t, &r(1, 2)).unwrap().points, vec![r(1, 4), r(3, 4)]);
        let id = level_set(&PLMap::identity(), &r(2, 5)).unwrap();
        assert_eq!(id.points, vec![r(2, 5)]);
        assert_eq!(id.count, LevelCount::Finite(1));
        assert!(id.intervals.is_empty());
        let tt = t.compose(&t).unwrap();
        assert_eq!(level_set(&tt, &r(1, 1)).unwrap().points, vec![r(1, 4), r(3, 4)]);
        assert!(level_set(&t, &r(2, 1)).is_err());
    }

    #[test]
    fn b0_examples() {
        assert!(b0_set(&PLMap::identity()).is_empty());
        assert!(b0_set(&PLMap::flip()).is_empty());
        let t = b0_set(&PLMap::tent());
        assert_eq!(t.closure, IntervalSet::unit());
        assert_eq!(t.excluded, vec![r(1, 1)]);
        assert!(t.contains(&r(0, 1)) && !t.contains(&r(1, 1)));
        assert_eq!(t.measure(), r(1, 1));
        let b = b0_set(&PLMap::skeleton());
        assert!(b.contains(&r(1, 6)) && b.contains(&r(1, 2)) && b.contains(&r(1, 3)));
        assert_eq!(b.measure(), r(1, 1));
        assert!(b.contains_interval());
    }

    #[test]
    fn scale_examples() {
        let d = scale_diagnostics(&PLMap::identity(), &r(1, 3), &r(1, 10)).unwrap();
        assert_eq!((d.max_dq, d.min_dq), (r(1, 1), r(1, 1)));
        let d = scale_diagnostics(&PLMap::tent(), &r(1, 2), &r(1, 4)).unwrap();
        assert_eq!((d.max_dq, d.min_dq), (r(2, 1), r(-2, 1)));
        assert!(scale_diagnostics(&PLMap::tent(), &r(1, 2), &r(0, 1)).is_err());
    }

    #[test]
    fn scale_matches_dense_sampling() {
        let f = PLMap::skeleton();
        for (x, rad) in [(r(1, 5), r(1, 3)), (r(0, 1), r(1, 2)), (r(1, 1), r(1, 7)), (r(5, 6), r(1, 9))] {
            let d = scale_diagnostics(&f, &x, &rad).unwrap();
            let fx = f.eval(&x);
            // every sampled quotient lies between the reported extremes
            for k in 1..=400 {
                let t = &x - &rad + &rad * r(k, 200);
                if t == x || !t.in_unit() {
                    continue;
                }
                let q = dq(&f, &x, &fx, &t);
                assert!(d.min_dq <= q && q <= d.max_dq);
            }
        }
    }
}
