//! Finite unions of closed rational intervals.

use std::fmt;

use crate::rat::Rat;

/// A closed interval `[lo, hi]` with `lo <= hi`; `lo == hi` is a point.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn unit() -> Self {
        Interval::new(Rat::zero(), Rat::one())
    }

    pub fn point(x: Rat) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn length(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rat {
        self.lo.midpoint(&self.hi)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_open(&self, x: &Rat) -> bool {
        &self.lo < x && x < &self.hi
    }

    pub fn is_subset_of_unit(&self) -> bool {
        self.lo.in_unit() && self.hi.in_unit()
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Canonical union of closed intervals: sorted, pairwise disjoint, and
/// separated by gaps of positive length. Two values describe the same set
/// iff they are equal.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    pub fn unit() -> Self {
        IntervalSet { intervals: vec![Interval::unit()] }
    }

    pub fn from_intervals(mut parts: Vec<Interval>) -> Self {
        if parts.windows(2).all(|w| w[0].hi < w[1].lo) {
            return IntervalSet { intervals: parts };
        }
        parts.sort_by(|a, b| a.lo.cmp(&b.lo).then_with(|| a.hi.cmp(&b.hi)));
        let mut out: Vec<Interval> = Vec::with_capacity(parts.len());
        for iv in parts {
            match out.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => out.push(iv),
            }
        }
        IntervalSet { intervals: out }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Number of connected components.
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn measure(&self) -> Rat {
        self.intervals.iter().map(Interval::length).sum()
    }

    pub fn contains(&self, x: &Rat) -> bool {
        let idx = self.intervals.partition_point(|iv| &iv.hi < x);
        self.intervals.get(idx).is_some_and(|iv| iv.contains(x))
    }

    /// True when some component has positive length.
    pub fn has_interval(&self) -> bool {
        self.intervals.iter().any(|iv| !iv.is_point())
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut all = self.intervals.clone();
        all.extend(other.intervals.iter().cloned());
        IntervalSet::from_intervals(all)
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = a[i].lo.max_ref(&b[j].lo);
            let hi = a[i].hi.min_ref(&b[j].hi);
            if lo <= hi {
                out.push(Interval::new(lo.clone(), hi.clone()));
            }
            if a[i].hi < b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet::from_intervals(out)
    }

    /// Closure of `self \ other`. Measure is exact; only boundary points of
    /// `other` may be added back.
    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for iv in &self.intervals {
            if iv.is_point() {
                if !other.contains(&iv.lo) {
                    out.push(iv.clone());
                }
                continue;
            }
            let mut cur = iv.lo.clone();
            for cut in other.intervals.iter() {
                if cut.hi < iv.lo || cut.lo > iv.hi {
                    continue;
                }
                if cut.lo > cur {
                    out.push(Interval::new(cur.clone(), cut.lo.clone()));
                }
                if cut.hi > cur {
                    cur = cut.hi.clone();
                }
            }
            if cur < iv.hi {
                out.push(Interval::new(cur, iv.hi.clone()));
            }
        }
        IntervalSet::from_intervals(out)
    }

    /// Closure of the symmetric difference.
    pub fn symmetric_difference(&self, other: &IntervalSet) -> IntervalSet {
        self.difference(other).union(&other.difference(self))
    }
}

impl fmt::Debug for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.intervals.iter().map(|iv| format!("{iv:?}")).collect();
        write!(f, "{}", parts.join(" ∪ "))
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
