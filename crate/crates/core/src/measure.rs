//! Lebesgue-measure preservation checks.
//!
//! A piecewise-affine map with nonzero slopes preserves Lebesgue measure iff
//! for every value `y` outside the finite set of determining values the fibre
//! weights `Σ_{f(x)=y} 1/|f'(x)|` add up to exactly 1. Between two
//! consecutive determining values the set of branches and their slopes do
//! not change, so one exact sample per open band decides the whole band.

use crate::interval_set::{Interval, IntervalSet};
use crate::plmap::{determining_values, preimage_interval, preimage_point, PLMap};
use crate::rat::Rat;

/// An open band `(lo, hi)` of values together with its fibre weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandWeight {
    pub band: Interval,
    pub weight_sum: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreservationVerdict {
    pub preserving: bool,
    /// First failing band, present iff `preserving` is false.
    pub witness: Option<BandWeight>,
}

/// `Σ 1/|slope|` over the fibre `f⁻¹(y)`.
pub fn fiber_weight(f: &PLMap, y: &Rat) -> Rat {
    preimage_point(f, y).iter().map(|(_, s)| s.abs().recip()).sum()
}

/// Fibre weight of every open band of values, in increasing order. Bands
/// below `min f` or above `max f` are reported with weight 0.
pub fn band_weights(f: &PLMap) -> Vec<BandWeight> {
    let dv = determining_values(f);
    let mut out = Vec::with_capacity(dv.len() + 1);
    let (lo, hi) = (dv.first().expect("nonempty"), dv.last().expect("nonempty"));
    if lo.is_positive() {
        out.push(BandWeight { band: Interval::new(Rat::zero(), lo.clone()), weight_sum: Rat::zero() });
    }
    for w in dv.windows(2) {
        let band = Interval::new(w[0].clone(), w[1].clone());
        let weight_sum = fiber_weight(f, &band.midpoint());
        out.push(BandWeight { band, weight_sum });
    }
    if *hi < Rat::one() {
        out.push(BandWeight { band: Interval::new(hi.clone(), Rat::one()), weight_sum: Rat::zero() });
    }
    out
}

pub fn check_measure_preserving(f: &PLMap) -> PreservationVerdict {
    let witness = band_weights(f).into_iter().find(|b| b.weight_sum != Rat::one());
    PreservationVerdict { preserving: witness.is_none(), witness }
}

pub fn is_measure_preserving(f: &PLMap) -> bool {
    check_measure_preserving(f).preserving
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreimageCheck {
    pub lhs: Rat,
    pub rhs: Rat,
    pub equal: bool,
}

/// Compares `λ(f⁻¹(J))` with `λ(J)`.
pub fn preimage_measure_check(f: &PLMap, j: &Interval) -> PreimageCheck {
    let lhs = preimage_interval(f, j).measure();
    let rhs = j.length();
    let equal = lhs == rhs;
    PreimageCheck { lhs, rhs, equal }
}

/// `λ(f⁻¹(J) △ g⁻¹(J))`.
pub fn preimage_stability(f: &PLMap, g: &PLMap, j: &Interval) -> Rat {
    let a: IntervalSet = preimage_interval(f, j);
    let b = preimage_interval(g, j);
    a.symmetric_difference(&b).measure()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::r;

    /// Brute-force fibre weight: scan every segment directly.
    fn oracle_weight(f: &PLMap, y: &Rat) -> Rat {
        let mut total = Rat::zero();
        for i in 0..f.segment_count() {
            let (a, b) = (&f.ys()[i], &f.ys()[i + 1]);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            if lo < y && y < hi {
                total += &f.slope(i).abs().recip();
            }
        }
        total
    }

    #[test]
    fn tent_preserves() {
        let v = check_measure_preserving(&PLMap::tent());
        assert!(v.preserving);
        assert!(v.witness.is_none());
        let bands = band_weights(&PLMap::tent());
        assert_eq!(bands.len(), 1);
        assert_eq!(bands[0].weight_sum, r(1, 1));
    }

    #[test]
    fn skeleton_preserves_with_expected_band_sums() {
        let b = PLMap::skeleton();
        let bands = band_weights(&b);
        assert_eq!(bands.len(), 2);
        assert_eq!(bands[0].band, Interval::new(r(0, 1), r(1, 3)));
        assert_eq!(oracle_weight(&b, &r(1, 6)), r(1, 1));
        assert_eq!(oracle_weight(&b, &r(2, 3)), r(3, 8) + r(5, 8));
        assert!(check_measure_preserving(&b).preserving);
    }

    #[test]
    fn non_preserving_witness() {
        let f = PLMap::from_points(vec![(r(0, 1), r(0, 1)), (r(1, 2), r(1, 1)), (r(1, 1), r(1, 2))]).unwrap();
        let v = check_measure_preserving(&f);
        assert!(!v.preserving);
        let w = v.witness.unwrap();
        // (0,1/2) is covered by the rising branch alone
        assert_eq!(w.band, Interval::new(r(0, 1), r(1, 2)));
        assert_eq!(w.weight_sum, r(1, 2));
        assert_eq!(band_weights(&f)[1].weight_sum, r(3, 2));
    }

    #[test]
    fn range_gaps_fail_with_zero_weight() {
        let f = PLMap::from_points(vec![(r(0, 1), r(1, 4)), (r(1, 1), r(1, 1))]).unwrap();
        let w = check_measure_preserving(&f).witness.unwrap();
        assert_eq!(w.band, Interval::new(r(0, 1), r(1, 4)));
        assert_eq!(w.weight_sum, r(0, 1));
    }

    #[test]
    fn preimage_measure_examples() {
        let c = preimage_measure_check(&PLMap::tent(), &Interval::new(r(0, 1), r(1, 2)));
        assert_eq!(c, PreimageCheck { lhs: r(1, 2), rhs: r(1, 2), equal: true });
        let j = Interval::new(r(2, 9), r(5, 7));
        let c = preimage_measure_check(&PLMap::identity(), &j);
        assert!(c.equal && c.lhs == j.length());
        let c = preimage_measure_check(&PLMap::skeleton(), &Interval::new(r(1, 3), r(5, 6)));
        assert_eq!(c, PreimageCheck { lhs: r(1, 2), rhs: r(1, 2), equal: true });
    }

    #[test]
    fn preimage_stability_examples() {
        let b = PLMap::skeleton();
        let j = Interval::new(r(1, 5), r(4, 5));
        assert_eq!(preimage_stability(&b, &b, &j), r(0, 1));
        let t = PLMap::tent();
        let tt = t.compose(&t).unwrap();
        assert_eq!(preimage_stability(&t, &tt, &Interval::unit()), r(0, 1));
        // id⁻¹[0,1/3] = [0,1/3]; Z3⁻¹[0,1/3] = [0,1/9] ∪ [5/9,7/9]
        let s = preimage_stability(&PLMap::identity(), &PLMap::zigzag(3), &Interval::new(r(0, 1), r(1, 3)));
        // [1/9,1/3] ∪ [5/9,7/9]
        assert_eq!(s, r(2, 9) + r(2, 9));
    }

    #[test]
    fn flip_conjugacy_keeps_verdict() {
        for f in [PLMap::tent(), PLMap::skeleton(), PLMap::zigzag(5)] {
            assert!(check_measure_preserving(&f.flip_conjugate()).preserving);
        }
        let bad = PLMap::from_points(vec![(r(0, 1), r(0, 1)), (r(1, 2), r(1, 1)), (r(1, 1), r(1, 2))]).unwrap();
        assert!(!check_measure_preserving(&bad.flip_conjugate()).preserving);
    }
}
