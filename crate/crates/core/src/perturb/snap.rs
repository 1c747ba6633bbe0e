//! Moving determining values onto the grid `{k/n}`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::plmap::{compose, determining_values, PLMap};
use crate::rat::Rat;

/// The grid excursion for a value `c` strictly inside `(k/n, (k+1)/n)`:
/// identity off that cell; inside, three full laps `k/n → (k+1)/n → k/n →
/// (k+1)/n` turning at the cell-midpoint `p = (k/n + c)/2` and at `c`. Fibre
/// weights are `(p−a)/(b−a) + (c−p)/(b−a) + (b−c)/(b−a) = 1`, and `c` is sent
/// to `k/n`.
pub fn grid_excursion(n: u64, c: &Rat) -> Result<PLMap> {
    let nr = Rat::from_int(n);
    let k = (c * &nr).floor();
    let a = Rat::from(k.clone()) / &nr;
    let b = Rat::from(k + 1) / &nr;
    if !(a < *c && *c < b) {
        return Err(Error::Precondition(format!("{c} already lies on the 1/{n} grid")));
    }
    let p = a.midpoint(c);
    let mut pts = Vec::new();
    if a.is_positive() {
        pts.push((Rat::zero(), Rat::zero()));
    }
    pts.push((a.clone(), a.clone()));
    pts.push((p, b.clone()));
    pts.push((c.clone(), a));
    pts.push((b.clone(), b.clone()));
    if b < Rat::one() {
        pts.push((Rat::one(), Rat::one()));
    }
    Ok(PLMap::from_points(pts)?)
}

fn cell_of(n: u64, c: &Rat) -> Option<BigInt> {
    let scaled = c * Rat::from_int(n);
    if scaled.is_integer() {
        None
    } else {
        Some(scaled.floor())
    }
}

/// Post-composes `f` with one grid excursion per off-grid determining value,
/// so that every determining value of the result is a multiple of `1/n`.
/// Each open grid cell may hold at most one determining value.
pub fn snap_determining_values(f: &PLMap, n: u64) -> Result<PLMap> {
    if n == 0 {
        return Err(Error::Precondition("grid size n must be positive".into()));
    }
    let dv = determining_values(f);
    let mut off_grid: Vec<(BigInt, Rat)> = Vec::new();
    for c in dv {
        if let Some(cell) = cell_of(n, &c) {
            if let Some((prev_cell, prev)) = off_grid.last() {
                if *prev_cell == cell {
                    return Err(Error::CellCollision(Box::new((prev.clone(), c))));
                }
            }
            off_grid.push((cell, c));
        }
    }
    let mut g = f.clone();
    for (_, c) in &off_grid {
        g = compose(&grid_excursion(n, c)?, &g)?;
    }
    Ok(g)
}

/// Smallest grid size `n` (searching upward from `start`) for which every
/// open cell holds at most one determining value.
pub fn separating_grid(f: &PLMap, start: u64) -> u64 {
    let dv = determining_values(f);
    let min_gap = dv.windows(2).map(|w| &w[1] - &w[0]).min().unwrap_or_else(Rat::one);
    // any n with 1/n <= min_gap separates
    let bound = min_gap.recip().ceil().to_u64().unwrap_or(u64::MAX);
    (start.max(1)..=bound.max(start.max(1))).find(|&n| snap_collision_free(&dv, n)).unwrap_or(bound)
}

fn snap_collision_free(dv: &[Rat], n: u64) -> bool {
    let cells: Vec<BigInt> = dv.iter().filter_map(|c| cell_of(n, c)).collect();
    cells.windows(2).all(|w| w[0] != w[1])
}
