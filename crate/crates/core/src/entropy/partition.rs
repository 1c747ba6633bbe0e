//! Interval partitions of [0,1] and their joins `P ∨ f⁻¹P ∨ … ∨ f⁻⁽ⁿ⁻¹⁾P`.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::interval_set::Interval;
use crate::plmap::PLMap;
use crate::rat::Rat;
use crate::Limits;

/// Largest dyadic level accepted by [`dyadic_partition`].
pub const MAX_DYADIC_LEVEL: u32 = 30;

/// A partition of [0,1] into closed intervals, given by its sorted cut
/// points (including 0 and 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    cuts: Vec<Rat>,
}

impl Partition {
    pub fn from_cuts(mut cuts: Vec<Rat>) -> Result<Partition> {
        cuts.push(Rat::zero());
        cuts.push(Rat::one());
        cuts.sort();
        cuts.dedup();
        if let Some(bad) = cuts.iter().find(|c| !c.in_unit()) {
            return Err(Error::Domain(bad.clone()));
        }
        Ok(Partition { cuts })
    }

    pub fn trivial() -> Partition {
        Partition { cuts: vec![Rat::zero(), Rat::one()] }
    }

    pub fn cuts(&self) -> &[Rat] {
        &self.cuts
    }

    pub fn len(&self) -> usize {
        self.cuts.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cells(&self) -> impl Iterator<Item = Interval> + '_ {
        self.cuts.windows(2).map(|w| Interval::new(w[0].clone(), w[1].clone()))
    }

    /// Index of the cell whose interior contains `x`.
    pub fn cell_of(&self, x: &Rat) -> usize {
        let k = self.cuts.partition_point(|c| c <= x);
        k.clamp(1, self.len()) - 1
    }
}

/// The `2^i` intervals `[j/2^i, (j+1)/2^i]`.
pub fn dyadic_partition(i: u32) -> Result<Partition> {
    if i == 0 {
        return Err(Error::Precondition("dyadic level must be at least 1".into()));
    }
    if i > MAX_DYADIC_LEVEL {
        return Err(Error::Budget { what: "dyadic level", reached: i as usize, limit: MAX_DYADIC_LEVEL as usize });
    }
    let m = 1u64 << i;
    Ok(Partition { cuts: (0..=m).map(|j| Rat::new(j, m)).collect() })
}

/// One level of the join: the elementary intervals between consecutive
/// cuts, each labelled by an itinerary id.
#[derive(Debug, Clone)]
pub struct JoinLevel {
    /// Word length `n` of the itineraries.
    pub n: u32,
    pub cuts: Vec<Rat>,
    /// Itinerary id of each elementary interval.
    pub ids: Vec<u32>,
    /// For each id, its first letter and the id of its tail at level `n − 1`.
    table: Vec<(u32, u32)>,
    /// Exact measure of each id; every entry is positive.
    pub measures: Vec<Rat>,
}

impl JoinLevel {
    pub fn group_count(&self) -> usize {
        self.measures.len()
    }

    pub fn cut_count(&self) -> usize {
        self.cuts.len()
    }
}

/// The levels `n = 1, 2, …` of the join, each computed from the previous
/// one: `C_n = cuts(P) ∪ f⁻¹(C_{n−1})`, and an elementary interval
/// with midpoint `m` gets the word (cell of `m`) followed by the level-`(n−1)`
/// word of the interval containing `f(m)`.
pub struct JoinLevels<'a> {
    f: &'a PLMap,
    p: &'a Partition,
    limits: Limits,
    tables: Vec<Vec<(u32, u32)>>,
    current: Option<JoinLevel>,
}

impl<'a> JoinLevels<'a> {
    pub fn new(f: &'a PLMap, p: &'a Partition, limits: &Limits) -> Self {
        JoinLevels { f, p, limits: limits.clone(), tables: Vec::new(), current: None }
    }

    /// The itinerary word of `id` at level `n` (1-based).
    pub fn word(&self, n: u32, id: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(n as usize);
        let mut id = id;
        for level in (0..n as usize).rev() {
            let (cell, tail) = self.tables[level][id as usize];
            out.push(cell);
            id = tail;
        }
        out
    }

    /// Computes the next level (the first call gives `n = 1`).
    pub fn advance(&mut self) -> Result<&JoinLevel> {
        let level = match &self.current {
            None => self.first_level()?,
            Some(prev) => self.next_level(prev)?,
        };
        self.tables.push(level.table.clone());
        Ok(self.current.insert(level))
    }

    pub fn current(&self) -> Option<&JoinLevel> {
        self.current.as_ref()
    }

    fn first_level(&self) -> Result<JoinLevel> {
        let cuts = self.p.cuts().to_vec();
        if cuts.len() > self.limits.cut_budget {
            return Err(Error::Budget { what: "cut", reached: cuts.len(), limit: self.limits.cut_budget });
        }
        let k = cuts.len() - 1;
        let measures = cuts.windows(2).map(|w| &w[1] - &w[0]).collect();
        Ok(JoinLevel {
            n: 1,
            ids: (0..k as u32).collect(),
            table: (0..k as u32).map(|c| (c, u32::MAX)).collect(),
            measures,
            cuts,
        })
    }

    fn next_level(&self, prev: &JoinLevel) -> Result<JoinLevel> {
        let f = self.f;
        let (xs, ys) = (f.xs(), f.ys());
        // size the preimage before building it
        let mut count = self.p.cuts().len();
        let ranges: Vec<(usize, usize)> = (0..f.segment_count())
            .map(|i| {
                let (lo, hi) = if ys[i] < ys[i + 1] { (&ys[i], &ys[i + 1]) } else { (&ys[i + 1], &ys[i]) };
                let a = prev.cuts.partition_point(|c| c < lo);
                let b = prev.cuts.partition_point(|c| c <= hi);
                (a, b)
            })
            .collect();
        for (a, b) in &ranges {
            count += b - a;
            if count > self.limits.cut_budget {
                return Err(Error::Budget { what: "cut", reached: count, limit: self.limits.cut_budget });
            }
        }
        let mut cuts: Vec<Rat> = Vec::with_capacity(count);
        cuts.extend(self.p.cuts().iter().cloned());
        for (i, &(a, b)) in ranges.iter().enumerate() {
            let slope = (&ys[i + 1] - &ys[i]) / (&xs[i + 1] - &xs[i]);
            for c in &prev.cuts[a..b] {
                cuts.push(&xs[i] + (c - &ys[i]) / &slope);
            }
        }
        cuts.sort();
        cuts.dedup();

        let mut intern: HashMap<(u32, u32), u32> = HashMap::new();
        let mut table = Vec::new();
        let mut measures: Vec<Rat> = Vec::new();
        let mut ids = Vec::with_capacity(cuts.len() - 1);
        for w in cuts.windows(2) {
            let mid = w[0].midpoint(&w[1]);
            let cell = self.p.cell_of(&mid) as u32;
            let image = f.eval(&mid);
            let k = prev.cuts.partition_point(|c| *c <= image).clamp(1, prev.cuts.len() - 1) - 1;
            let key = (cell, prev.ids[k]);
            let id = *intern.entry(key).or_insert_with(|| {
                table.push(key);
                measures.push(Rat::zero());
                (table.len() - 1) as u32
            });
            measures[id as usize] += &w[1] - &w[0];
            ids.push(id);
        }
        Ok(JoinLevel { n: prev.n + 1, cuts, ids, table, measures })
    }
}

/// Elementary intervals of a join with their itinerary words, and the
/// exact measure of each word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPartition {
    pub cells: Vec<(Interval, Vec<u32>)>,
    pub groups: BTreeMap<Vec<u32>, Rat>,
}

impl LabeledPartition {
    pub fn total_measure(&self) -> Rat {
        self.groups.values().sum()
    }
}

/// `P ∨ f⁻¹P ∨ … ∨ f⁻⁽ⁿ⁻¹⁾P` with itinerary grouping.
pub fn join_partition(f: &PLMap, p: &Partition, n: u32, limits: &Limits) -> Result<LabeledPartition> {
    if n == 0 {
        return Err(Error::Precondition("word length n must be at least 1".into()));
    }
    let mut levels = JoinLevels::new(f, p, limits);
    for _ in 0..n {
        levels.advance()?;
    }
    let level = levels.current().expect("n >= 1").clone();
    let words: Vec<Vec<u32>> = (0..level.group_count() as u32).map(|id| levels.word(n, id)).collect();
    let cells = level
        .cuts
        .windows(2)
        .zip(&level.ids)
        .map(|(w, id)| (Interval::new(w[0].clone(), w[1].clone()), words[*id as usize].clone()))
        .collect();
    let groups = words.into_iter().zip(level.measures).collect();
    Ok(LabeledPartition { cells, groups })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::r;

    #[test]
    fn dyadic_examples() {
        let p = dyadic_partition(1).unwrap();
        assert_eq!(
            p.cells().collect::<Vec<_>>(),
            vec![Interval::new(r(0, 1), r(1, 2)), Interval::new(r(1, 2), r(1, 1))]
        );
        let p = dyadic_partition(2).unwrap();
        assert!(p.cells().all(|c| c.length() == r(1, 4)));
        assert_eq!(dyadic_partition(3).unwrap().cuts()[5], r(5, 8));
        assert!(matches!(dyadic_partition(31), Err(Error::Budget { .. })));
        assert!(dyadic_partition(0).is_err());
        assert_eq!(p.cell_of(&r(1, 4)), 1);
        assert_eq!(p.cell_of(&r(1, 1)), 3);
        assert_eq!(p.cell_of(&r(0, 1)), 0);
    }

    /// Oracle: itinerary of each of `den` equal subintervals by direct
    /// iteration of the midpoint.
    fn brute_groups(f: &PLMap, p: &Partition, n: u32, den: i64) -> BTreeMap<Vec<u32>, Rat> {
        let mut out = BTreeMap::new();
        for k in 0..den {
            let mut x = r(2 * k + 1, 2 * den);
            let mut word = Vec::new();
            for _ in 0..n {
                word.push(p.cell_of(&x) as u32);
                x = f.eval(&x);
            }
            *out.entry(word).or_insert_with(Rat::zero) += r(1, den);
        }
        out
    }

    #[test]
    fn identity_join_is_p() {
        let p = dyadic_partition(1).unwrap();
        for n in 1..6 {
            let lp = join_partition(&PLMap::identity(), &p, n, &Limits::default()).unwrap();
            assert_eq!(lp.groups.len(), 2);
            assert!(lp.groups.values().all(|m| *m == r(1, 2)));
        }
    }

    #[test]
    fn tent_join_matches_oracle() {
        let p = dyadic_partition(1).unwrap();
        let t = PLMap::tent();
        let lp = join_partition(&t, &p, 2, &Limits::default()).unwrap();
        assert_eq!(lp.groups.len(), 4);
        assert!(lp.groups.values().all(|m| *m == r(1, 4)));
        // elementary intervals of the n=2 join of T are the dyadic quarters
        assert_eq!(lp.groups, brute_groups(&t, &p, 2, 16));
        for n in 1..=10 {
            let lp = join_partition(&t, &p, n, &Limits::default()).unwrap();
            assert_eq!(lp.groups.len(), 1 << n);
            assert!(lp.groups.values().all(|m| *m == Rat::new(1, 1u64 << n)));
            if n <= 6 {
                assert_eq!(lp.groups, brute_groups(&t, &p, n, 1 << (n + 2)));
            }
        }
    }

    #[test]
    fn words_agree_with_cells() {
        let f = PLMap::skeleton();
        let p = dyadic_partition(2).unwrap();
        let lp = join_partition(&f, &p, 3, &Limits::default()).unwrap();
        assert_eq!(lp.total_measure(), Rat::one());
        for (cell, word) in &lp.cells {
            let mut x = cell.midpoint();
            for letter in word {
                assert_eq!(p.cell_of(&x) as u32, *letter);
                x = f.eval(&x);
            }
        }
    }

    #[test]
    fn cut_budget() {
        let limits = Limits { cut_budget: 50, ..Limits::default() };
        let p = dyadic_partition(2).unwrap();
        match join_partition(&PLMap::zigzag(5), &p, 3, &limits) {
            Err(Error::Budget { what: "cut", reached, limit: 50 }) => assert!(reached > 50),
            other => panic!("{other:?}"),
        }
    }
}
