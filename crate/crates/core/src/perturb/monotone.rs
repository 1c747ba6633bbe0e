//! Membership in the classes `A_n`.
//!
//! `f ∈ A_n` iff some `x` and `γ ∈ [−n, n]` make `f(t) − γt` one-sidedly
//! monotone at `x` on `(x − 1/n, x + 1/n)`. Dividing the two monotonicity
//! inequalities by `t − x`, this says every difference quotient at `x` over
//! the punctured window is at least `γ`; so `x` is a witness iff the infimum
//! of those quotients is at least `−n`. With `g(t) = f(t) + n·t` the same
//! condition reads: `g(x)` is the minimum of `g` on `[x, x + 1/n]` and the
//! maximum of `g` on `[x − 1/n, x]` (windows clipped to [0,1]).

use std::collections::VecDeque;

use crate::analyze::dq_candidates;
use crate::error::{Error, Result};
use crate::plmap::PLMap;
use crate::rat::Rat;
use crate::Limits;

/// Exact infimum of `(f(t) − f(x)) / (t − x)` over the punctured window
/// `(x − r, x + r) ∩ [0,1] \ {x}`.
pub fn inf_difference_quotient(f: &PLMap, x: &Rat, r: &Rat) -> Result<Rat> {
    if !x.in_unit() {
        return Err(Error::Domain(x.clone()));
    }
    Ok(dq_candidates(f, x, r).into_iter().min().expect("window is nonempty"))
}

/// True iff `x` witnesses `f ∈ A_n`, i.e. the infimum of the difference
/// quotients at `x` over the punctured `1/n`-window is at least `−n`.
///
/// Candidates are scanned outward from `x`, alternating sides, and the scan
/// stops at the first quotient below `−n`.
pub fn verify_a_n_witness(f: &PLMap, n: u32, x: &Rat) -> Result<bool> {
    if !x.in_unit() {
        return Err(Error::Domain(x.clone()));
    }
    if n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    let bound = -Rat::from_int(n);
    let h = Rat::new(1, n);
    let xs = f.xs();
    let fx = f.eval(x);
    let below = |t: &Rat| (f.eval(t) - &fx) / (t - x) < bound;
    if *x > Rat::zero() && f.slope(xs.partition_point(|b| b < x) - 1) < bound {
        return Ok(false);
    }
    if *x < Rat::one() && f.slope(xs.partition_point(|b| b <= x) - 1) < bound {
        return Ok(false);
    }
    let lo = if *x > h { x - &h } else { Rat::zero() };
    let hi = if x + &h < Rat::one() { x + &h } else { Rat::one() };
    let mut right = xs[xs.partition_point(|b| b <= x)..].iter().take_while(|t| **t < hi);
    let mut left = xs[..xs.partition_point(|b| b < x)].iter().rev().take_while(|t| **t > lo);
    loop {
        let (r, l) = (right.next(), left.next());
        if r.is_none() && l.is_none() {
            break;
        }
        if r.is_some_and(below) || l.is_some_and(below) {
            return Ok(false);
        }
    }
    if (hi > *x && below(&hi)) || (lo < *x && below(&lo)) {
        return Ok(false);
    }
    Ok(true)
}

/// Result of the exact `A_n` decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnDecision {
    /// A point `x` witnessing `f ∈ A_n`, if one exists.
    pub witness: Option<Rat>,
    /// Number of cells examined.
    pub cells: usize,
}

impl AnDecision {
    pub fn excluded(&self) -> bool {
        self.witness.is_none()
    }
}

/// Affine function on a cell, stored as value at the cell's left end plus slope.
struct Affine {
    at_lo: Rat,
    slope: Rat,
}

/// Feasible subinterval of `[lo, hi]` under constraints `d(x) ≤ 0`.
struct Feasible {
    lo: Rat,
    min: Rat,
    max: Rat,
    empty: bool,
}

impl Feasible {
    fn new(lo: &Rat, hi: &Rat) -> Self {
        Feasible { lo: lo.clone(), min: lo.clone(), max: hi.clone(), empty: false }
    }

    /// Imposes `a(x) ≤ b(x)`.
    fn le(&mut self, a: &Affine, b: &Affine) {
        if self.empty {
            return;
        }
        let d0 = &a.at_lo - &b.at_lo;
        let ds = &a.slope - &b.slope;
        if ds.is_zero() {
            if d0.is_positive() {
                self.empty = true;
            }
            return;
        }
        let root = &self.lo - d0 / &ds;
        if ds.is_positive() {
            if root < self.max {
                self.max = root;
            }
        } else if root > self.min {
            self.min = root;
        }
        if self.min > self.max {
            self.empty = true;
        }
    }

    fn le_const(&mut self, a: &Affine, c: &Rat) {
        self.le(a, &Affine { at_lo: c.clone(), slope: Rat::zero() });
    }

    fn ge_const(&mut self, a: &Affine, c: &Rat) {
        let neg = Affine { at_lo: -&a.at_lo, slope: -&a.slope };
        self.le_const(&neg, &-c);
    }
}

/// Sliding-window extreme over breakpoint values with nondecreasing index
/// ranges.
struct Window {
    deque: VecDeque<usize>,
    pushed: usize,
    keep_min: bool,
}

impl Window {
    fn new(keep_min: bool) -> Self {
        Window { deque: VecDeque::new(), pushed: 0, keep_min }
    }

    /// Extreme of `vals[from..to]`.
    fn extreme<'a>(&mut self, vals: &'a [Rat], from: usize, to: usize) -> Option<&'a Rat> {
        while self.pushed < to {
            let v = &vals[self.pushed];
            while let Some(&back) = self.deque.back() {
                let dominated = if self.keep_min { &vals[back] >= v } else { &vals[back] <= v };
                if dominated {
                    self.deque.pop_back();
                } else {
                    break;
                }
            }
            self.deque.push_back(self.pushed);
            self.pushed += 1;
        }
        while self.deque.front().is_some_and(|&i| i < from) {
            self.deque.pop_front();
        }
        if from >= to {
            return None;
        }
        self.deque.front().map(|&i| &vals[i])
    }
}

fn merged_events(xs: &[Rat], h: &Rat) -> Vec<Rat> {
    let one = Rat::one();
    let mut ev: Vec<Rat> = Vec::with_capacity(xs.len() * 3);
    ev.extend(xs.iter().cloned());
    ev.extend(xs.iter().map(|b| b - h).filter(|t| t.is_positive()));
    ev.extend(xs.iter().map(|b| b + h).filter(|t| *t < one));
    ev.sort();
    ev.dedup();
    ev
}

/// Decides `f ∈ A_n` exactly.
///
/// `[0,1]` is cut at the breakpoints of `f` and their `±1/n` translates. On
/// each cell the breakpoints inside the right and left windows are fixed,
/// and `g(x)`, `g(x + 1/n)`, `g(x − 1/n)` are affine, so the witnesses in a
/// cell form an interval cut out by at most four affine inequalities.
pub fn decide_a_n(f: &PLMap, n: u32, limits: &Limits) -> Result<AnDecision> {
    if n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    let nn = Rat::from_int(n);
    let h = Rat::new(1, n);
    let xs = f.xs();
    let slopes = f.slopes();
    let gv: Vec<Rat> = f.points().map(|(x, y)| y + &nn * x).collect();
    let events = merged_events(xs, &h);
    let cells = events.len() - 1;
    if cells > limits.cell_budget {
        return Err(Error::Budget { what: "cell", reached: cells, limit: limits.cell_budget });
    }
    let g_at = |x: &Rat| f.eval(x) + &nn * x;
    let affine_at = |x: &Rat, seg: usize| Affine { at_lo: g_at(x), slope: &slopes[seg] + &nn };
    let seg_right_of = |x: &Rat| (xs.partition_point(|b| b <= x) - 1).min(slopes.len() - 1);

    let mut right_min = Window::new(true);
    let mut left_max = Window::new(false);
    let one = Rat::one();
    for k in 0..cells {
        let (lo, hi) = (&events[k], &events[k + 1]);
        let g = affine_at(lo, seg_right_of(lo));
        let mut feas = Feasible::new(lo, hi);

        // right window: g(x) <= g(t) for t in [x, x + h]
        let r_from = xs.partition_point(|b| b < hi);
        let r_to = xs.partition_point(|b| *b <= lo + &h);
        if let Some(c) = right_min.extreme(&gv, r_from, r_to) {
            feas.le_const(&g, c);
        }
        let lo_h = lo + &h;
        if hi + &h <= one {
            let shifted = affine_at(&lo_h, seg_right_of(&lo_h));
            feas.le(&g, &shifted);
        }

        // left window: g(x) >= g(t) for t in [x - h, x]
        let hi_h = hi - &h;
        let l_from = xs.partition_point(|b| *b < hi_h);
        let l_to = xs.partition_point(|b| b <= lo);
        if let Some(c) = left_max.extreme(&gv, l_from, l_to) {
            feas.ge_const(&g, c);
        }
        let lo_mh = lo - &h;
        if !lo_mh.is_negative() {
            let shifted = affine_at(&lo_mh, seg_right_of(&lo_mh));
            feas.le(&shifted, &g);
        }

        if !feas.empty {
            return Ok(AnDecision { witness: Some(feas.min), cells });
        }
    }
    Ok(AnDecision { witness: None, cells })
}

/// True iff `f ∉ A_n`.
pub fn not_in_a_n_check(f: &PLMap, n: u32) -> Result<bool> {
    Ok(decide_a_n(f, n, &Limits::default())?.excluded())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::r;

    #[test]
    fn witness_examples() {
        assert!(verify_a_n_witness(&PLMap::identity(), 1, &r(1, 2)).unwrap());
        assert!(verify_a_n_witness(&PLMap::zigzag(3), 1, &r(0, 1)).unwrap());
        assert!(verify_a_n_witness(&PLMap::tent(), 2, &r(0, 1)).unwrap());
        // at the tent peak the right slope is -2 < -1
        assert!(!verify_a_n_witness(&PLMap::tent(), 1, &r(1, 2)).unwrap());
        assert!(verify_a_n_witness(&PLMap::tent(), 1, &r(3, 2)).is_err());
    }

    #[test]
    fn infimum_examples() {
        assert_eq!(inf_difference_quotient(&PLMap::identity(), &r(1, 3), &r(1, 1)).unwrap(), r(1, 1));
        // tent at 0 over (0, 1): quotients run from 2 down to T(1)/1 = 0
        assert_eq!(inf_difference_quotient(&PLMap::tent(), &r(0, 1), &r(1, 1)).unwrap(), r(0, 1));
        assert_eq!(inf_difference_quotient(&PLMap::tent(), &r(0, 1), &r(1, 2)).unwrap(), r(2, 1));
    }

    #[test]
    fn decision_examples() {
        for n in 1..6 {
            assert!(!not_in_a_n_check(&PLMap::identity(), n).unwrap());
        }
        assert!(!not_in_a_n_check(&PLMap::tent(), 2).unwrap());
        let d = decide_a_n(&PLMap::tent(), 2, &Limits::default()).unwrap();
        let x = d.witness.unwrap();
        assert!(verify_a_n_witness(&PLMap::tent(), 2, &x).unwrap());
    }

    #[test]
    fn steep_zigzag_is_excluded_for_small_n() {
        // Z_9 with slopes ±9: every point has a nearby quotient below -1
        let z = PLMap::zigzag(9);
        let d = decide_a_n(&z, 1, &Limits::default()).unwrap();
        // x = 0 rises with slope 9 but Z(2/9) = 0 gives quotient 0 >= -1
        assert_eq!(d.witness.is_some(), brute_force_has_witness(&z, 1));
    }

    /// Dense-grid oracle: checks every grid point with denominator `den`
    /// through the literal quotient infimum.
    fn brute_force_has_witness(f: &PLMap, n: u32) -> bool {
        let den = 720;
        (0..=den).any(|k| {
            let x = r(k, den);
            inf_difference_quotient(f, &x, &Rat::new(1, n)).unwrap() >= -Rat::from_int(n)
        })
    }

    #[test]
    fn decision_agrees_with_grid_oracle_on_small_maps() {
        let maps =
            [PLMap::identity(), PLMap::flip(), PLMap::tent(), PLMap::skeleton(), PLMap::zigzag(3), PLMap::zigzag(6)];
        for f in &maps {
            for n in 1..=4 {
                let d = decide_a_n(f, n, &Limits::default()).unwrap();
                if let Some(x) = &d.witness {
                    assert!(verify_a_n_witness(f, n, x).unwrap(), "{f:?} n={n} x={x}");
                } else {
                    assert!(!brute_force_has_witness(f, n), "{f:?} n={n}");
                }
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let limits = Limits { cell_budget: 3, ..Limits::default() };
        assert!(matches!(decide_a_n(&PLMap::zigzag(5), 2, &limits), Err(Error::Budget { what: "cell", .. })));
    }
}
