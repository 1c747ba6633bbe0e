//! Partition entropies of joins.
//!
//! Join cell measures are exact rationals; only the logarithms are
//! approximated, in fixed point at a configurable number of decimal digits.

pub mod partition;
pub mod precision;

use std::cmp::Ordering;

pub use partition::{dyadic_partition, join_partition, JoinLevel, JoinLevels, LabeledPartition, Partition};
pub use precision::{parse_decimal, LnContext, Real};

use crate::error::{Error, Result};
use crate::plmap::PLMap;
use crate::rat::Rat;
use crate::Limits;

pub const DEFAULT_DIGITS: u32 = 50;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntropyConfig {
    pub digits: u32,
    pub limits: Limits,
}

impl Default for EntropyConfig {
    fn default() -> Self {
        EntropyConfig { digits: DEFAULT_DIGITS, limits: Limits::default() }
    }
}

/// `−Σ μ ln μ` over positive exact measures.
pub fn entropy_of_measures<'a>(measures: impl IntoIterator<Item = &'a Rat>, ctx: &mut LnContext) -> Real {
    let mut sum = ctx.zero();
    for mu in measures {
        if mu.is_positive() {
            sum = sum.add(&ctx.neg_x_ln_x(mu));
        }
    }
    sum
}

#[allow(non_snake_case)]
pub fn entropy_H(lp: &LabeledPartition, digits: u32) -> Real {
    entropy_of_measures(lp.groups.values(), &mut LnContext::new(digits))
}

/// `h_n(f, P) = H(P ∨ f⁻¹P ∨ … ∨ f⁻⁽ⁿ⁻¹⁾P) / n`.
pub fn h_n(f: &PLMap, p: &Partition, n: u32, config: &EntropyConfig) -> Result<Real> {
    if n == 0 {
        return Err(Error::Precondition("word length n must be at least 1".into()));
    }
    let mut levels = JoinLevels::new(f, p, &config.limits);
    for _ in 1..n {
        levels.advance()?;
    }
    let level = levels.advance()?;
    let mut ctx = LnContext::new(config.digits);
    Ok(entropy_of_measures(&level.measures, &mut ctx).div_int(u64::from(n)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntropyRow {
    /// Dyadic level of the partition `P_i`.
    pub i: u32,
    pub n: u32,
    pub h: Real,
    pub cut_count: usize,
    pub group_count: usize,
    /// Exact group measures, kept when requested.
    pub measures: Option<Vec<Rat>>,
}

/// A join level that was not computed because it exceeded the cut budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Truncation {
    pub i: u32,
    pub n: u32,
    pub cuts: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntropyProfile {
    pub rows: Vec<EntropyRow>,
    pub exact_measures_retained: bool,
    /// Partitions whose rows stop early, with the level that overflowed.
    pub truncated: Vec<Truncation>,
}

impl EntropyProfile {
    pub fn row(&self, i: u32, n: u32) -> Option<&EntropyRow> {
        self.rows.iter().find(|r| r.i == i && r.n == n)
    }

    /// Pairs `(i, n)` where `h_{n+1} > h_n` beyond the working tolerance.
    pub fn monotonicity_violations(&self) -> Vec<(u32, u32)> {
        self.rows
            .windows(2)
            .filter(|w| w[0].i == w[1].i && w[1].n == w[0].n + 1 && w[1].h.cmp_tol(&w[0].h) == Ordering::Greater)
            .map(|w| (w[0].i, w[0].n))
            .collect()
    }
}

/// Options for [`entropy_profile`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileOptions {
    pub retain_measures: bool,
    /// Record a [`Truncation`] instead of failing when a level exceeds the
    /// cut budget.
    pub truncate_on_budget: bool,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions { retain_measures: false, truncate_on_budget: true }
    }
}

/// `h_n(f, P_i)` for `i` in `levels` and `n = 1..=n_max`, one incremental
/// join per `i`.
pub fn entropy_profile(
    f: &PLMap,
    levels: impl IntoIterator<Item = u32>,
    n_max: u32,
    config: &EntropyConfig,
    options: &ProfileOptions,
) -> Result<EntropyProfile> {
    let mut ctx = LnContext::new(config.digits);
    let mut rows = Vec::new();
    let mut truncated = Vec::new();
    for i in levels {
        let p = dyadic_partition(i)?;
        let mut join = JoinLevels::new(f, &p, &config.limits);
        for n in 1..=n_max {
            let level = match join.advance() {
                Ok(level) => level,
                Err(Error::Budget { what: "cut", reached, .. }) if options.truncate_on_budget => {
                    truncated.push(Truncation { i, n, cuts: reached });
                    break;
                }
                Err(e) => return Err(e),
            };
            let h = entropy_of_measures(&level.measures, &mut ctx).div_int(u64::from(n));
            rows.push(EntropyRow {
                i,
                n,
                h,
                cut_count: level.cut_count(),
                group_count: level.group_count(),
                measures: options.retain_measures.then(|| level.measures.clone()),
            });
        }
    }
    Ok(EntropyProfile { rows, exact_measures_retained: options.retain_measures, truncated })
}

/// Both sides of `−Σ a_j ln a_j ≤ η ln ℓ − η ln η` for `η = Σ a_j < 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumBound {
    pub lhs: Real,
    pub rhs: Real,
    pub holds: bool,
    /// Exact: the two sides agree iff all `a_j` are equal.
    pub equality: bool,
}

pub fn entropy_sum_bound(a: &[Rat], digits: u32) -> Result<SumBound> {
    if a.is_empty() {
        return Err(Error::Precondition("need at least one number".into()));
    }
    if let Some(bad) = a.iter().find(|x| !x.is_positive()) {
        return Err(Error::Precondition(format!("{bad} is not positive")));
    }
    let eta: Rat = a.iter().sum();
    if eta >= Rat::one() {
        return Err(Error::Precondition(format!("the numbers sum to {eta}, not below 1")));
    }
    let mut ctx = LnContext::new(digits);
    let lhs = entropy_of_measures(a, &mut ctx);
    let ell = ctx.ln_int(a.len() as u64).mul_rat(&eta);
    let rhs = ell.add(&ctx.neg_x_ln_x(&eta));
    let equality = a.iter().all(|x| *x == a[0]);
    let holds = equality || lhs.cmp_tol(&rhs) != Ordering::Greater;
    Ok(SumBound { lhs, rhs, holds, equality })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QBetaWitness {
    pub i: u32,
    pub n: u32,
    pub value: Real,
}

/// First `(i, n)` in lexicographic order with `k ≤ i ≤ i_max`,
/// `k ≤ n ≤ n_max` and `h_n(f, P_i) < β`. A value within `10^−digits` of `β`
/// is not accepted as below it.
pub fn q_beta_certificate(
    f: &PLMap,
    beta: &Rat,
    k: u32,
    i_max: u32,
    n_max: u32,
    config: &EntropyConfig,
) -> Result<Option<QBetaWitness>> {
    if !beta.is_positive() {
        return Err(Error::Precondition(format!("beta {beta} must be positive")));
    }
    if k == 0 || k > i_max || k > n_max {
        return Err(Error::Precondition(format!("need 1 <= k <= i_max, n_max (k = {k})")));
    }
    let b = Real::from_rat(beta, config.digits);
    let mut ctx = LnContext::new(config.digits);
    for i in k..=i_max {
        let p = dyadic_partition(i)?;
        let mut join = JoinLevels::new(f, &p, &config.limits);
        for n in 1..=n_max {
            let level = join.advance()?;
            if n < k {
                continue;
            }
            let h = entropy_of_measures(&level.measures, &mut ctx).div_int(u64::from(n));
            if h.cmp_tol(&b) == Ordering::Less {
                return Ok(Some(QBetaWitness { i, n, value: h }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::r;
    use std::collections::BTreeMap;

    fn lp(measures: &[Rat]) -> LabeledPartition {
        let groups: BTreeMap<Vec<u32>, Rat> =
            measures.iter().enumerate().map(|(k, m)| (vec![k as u32], m.clone())).collect();
        LabeledPartition { cells: Vec::new(), groups }
    }

    #[test]
    fn entropy_examples() {
        let ctx = LnContext::new(50);
        let ln2 = ctx.ln2();
        assert!(entropy_H(&lp(&[r(1, 2), r(1, 2)]), 50).approx_eq(&ln2));
        assert!(entropy_H(&lp(&[r(1, 1)]), 50).approx_eq(&ctx.zero()));
        let three_halves = ln2.mul_rat(&r(3, 2));
        assert!(entropy_H(&lp(&[r(1, 4), r(1, 4), r(1, 2)]), 50).approx_eq(&three_halves));
    }

    #[test]
    fn h_n_examples() {
        let cfg = EntropyConfig::default();
        let mut ctx = LnContext::new(cfg.digits);
        let ln2 = ctx.ln2();
        for i in 1..=3 {
            let p = dyadic_partition(i).unwrap();
            for n in 1..=4 {
                let h = h_n(&PLMap::identity(), &p, n, &cfg).unwrap();
                assert!(h.approx_eq(&ln2.mul_rat(&r(i as i64, n as i64))));
            }
        }
        let p1 = dyadic_partition(1).unwrap();
        for n in 1..=6 {
            assert!(h_n(&PLMap::tent(), &p1, n, &cfg).unwrap().approx_eq(&ln2));
        }
        // a two-cell partition caps h_n at ln 2; the quarters see the full ln 4
        let ln4 = ctx.ln_int(4);
        let p2 = dyadic_partition(2).unwrap();
        for n in 1..=4 {
            assert!(h_n(&PLMap::zigzag(4), &p1, n, &cfg).unwrap().approx_eq(&ln2));
            assert!(h_n(&PLMap::zigzag(4), &p2, n, &cfg).unwrap().approx_eq(&ln4));
        }
    }

    #[test]
    fn profile_is_monotone_and_records_truncation() {
        let cfg = EntropyConfig { digits: 30, limits: Limits { cut_budget: 400, ..Limits::default() } };
        let prof = entropy_profile(&PLMap::skeleton(), 1..=2, 8, &cfg, &ProfileOptions::default()).unwrap();
        assert!(prof.monotonicity_violations().is_empty());
        assert!(!prof.truncated.is_empty());
        assert!(prof.rows.iter().all(|r| r.cut_count <= 400));
        let strict = ProfileOptions { truncate_on_budget: false, ..ProfileOptions::default() };
        assert!(entropy_profile(&PLMap::skeleton(), 1..=2, 8, &cfg, &strict).is_err());
    }

    #[test]
    fn bound_examples() {
        let b = entropy_sum_bound(&[r(1, 4), r(1, 4)], 50).unwrap();
        assert!(b.holds && b.equality);
        let ln2 = LnContext::new(50).ln2();
        assert!(b.lhs.approx_eq(&ln2) && b.rhs.approx_eq(&ln2));
        let b = entropy_sum_bound(&[r(1, 2) - r(1, 1000)], 50).unwrap();
        assert!(b.holds && b.equality && b.lhs.approx_eq(&b.rhs));
        let b = entropy_sum_bound(&[r(1, 8), r(3, 8)], 50).unwrap();
        assert!(b.holds && !b.equality && b.lhs < b.rhs);
        assert!(entropy_sum_bound(&[r(1, 2), r(1, 2)], 50).is_err());
        assert!(entropy_sum_bound(&[r(0, 1)], 50).is_err());
    }

    #[test]
    fn q_beta_examples() {
        let cfg = EntropyConfig::default();
        let w = q_beta_certificate(&PLMap::identity(), &r(1, 10), 1, 3, 10, &cfg).unwrap().unwrap();
        assert_eq!((w.i, w.n), (1, 7));
        assert!(q_beta_certificate(&PLMap::tent(), &r(1, 10), 1, 3, 10, &cfg).unwrap().is_none());
        let w = q_beta_certificate(&PLMap::identity(), &r(1, 1), 1, 2, 2, &cfg).unwrap().unwrap();
        assert_eq!((w.i, w.n), (1, 1));
        assert!(w.value.to_decimal().starts_with("0.693147"));
    }
}
