//! Window perturbations: replace `f` on a window `[a,b]` by `f ∘ s`, where
//! `s` is a piecewise-affine self-surjection of `[a,b]` whose fibre weights
//! sum to 1.

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::interval_set::Interval;
use crate::measure::check_measure_preserving;
use crate::plmap::{compose_polyline, composed_piece_count, PLMap};
use crate::rat::Rat;
use crate::Limits;

/// Whether the shape must fix the window endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndpointRule {
    Fixed,
    /// Endpoint images are unconstrained; only usable where the window
    /// touches 0 or 1, or where the caller restores continuity otherwise.
    Waived,
}

/// A self-map `s` of a window, stored in normalized coordinates:
/// `s(a + w·t) = a + w·shape(t)` with `w = b − a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowMap {
    window: Interval,
    shape: PLMap,
    rule: EndpointRule,
}

impl WindowMap {
    /// Validates surjectivity, nonzero slopes, the local fibre-weight
    /// condition and the endpoint rule.
    pub fn new(window: Interval, shape: PLMap, rule: EndpointRule) -> Result<Self> {
        if window.is_point() || !window.is_subset_of_unit() {
            return Err(Error::InvalidWindow(format!("window {window} must be a nondegenerate subinterval of [0,1]")));
        }
        if let Some(w) = check_measure_preserving(&shape).witness {
            return Err(Error::InvalidWindow(format!(
                "shape fibre weight {} on band ({}, {}) of the normalized window",
                w.weight_sum, w.band.lo, w.band.hi
            )));
        }
        if rule == EndpointRule::Fixed {
            let ys = shape.ys();
            if !ys[0].is_zero() || ys[ys.len() - 1] != Rat::one() {
                return Err(Error::InvalidWindow("shape does not fix the window endpoints".into()));
            }
        }
        Ok(WindowMap { window, shape, rule })
    }

    /// Shape whose laps each sweep the whole window, with lap boundaries at
    /// `boundaries` (absolute coordinates, from `a` to `b`). The first lap
    /// rises when `start_up` is true.
    pub fn from_laps(window: Interval, boundaries: &[Rat], start_up: bool, rule: EndpointRule) -> Result<Self> {
        if boundaries.len() < 2 || boundaries[0] != window.lo || boundaries[boundaries.len() - 1] != window.hi {
            return Err(Error::InvalidWindow("lap boundaries must run from a to b".into()));
        }
        let w = window.length();
        let xs: Vec<Rat> = boundaries.iter().map(|x| (x - &window.lo) / &w).collect();
        let ys: Vec<Rat> =
            (0..boundaries.len()).map(|k| if (k % 2 == 0) == start_up { Rat::zero() } else { Rat::one() }).collect();
        let shape = PLMap::new(xs, ys).map_err(|e| Error::InvalidWindow(e.to_string()))?;
        WindowMap::new(window, shape, rule)
    }

    pub fn window(&self) -> &Interval {
        &self.window
    }

    pub fn shape(&self) -> &PLMap {
        &self.shape
    }

    pub fn rule(&self) -> EndpointRule {
        self.rule
    }

    /// Breakpoints of `s` in absolute coordinates.
    pub fn absolute_points(&self) -> (Vec<Rat>, Vec<Rat>) {
        let w = self.window.length();
        let lift = |t: &Rat| &self.window.lo + &w * t;
        (self.shape.xs().iter().map(lift).collect(), self.shape.ys().iter().map(lift).collect())
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let w = self.window.length();
        let t = (x - &self.window.lo) / &w;
        &self.window.lo + &w * self.shape.eval(&t)
    }
}

/// The regular `m`-fold shape: `m` laps of equal width and slope `±m`,
/// starting upward. Fixes both endpoints iff `m` is odd; for even `m` the
/// right endpoint is sent to the left one and the rule is `Waived`.
pub fn regular_window_shape(window: Interval, m: u32) -> Result<WindowMap> {
    if m == 0 {
        return Err(Error::Precondition("m must be at least 1".into()));
    }
    let rule = if m % 2 == 1 { EndpointRule::Fixed } else { EndpointRule::Waived };
    WindowMap::new(window, PLMap::zigzag(m), rule)
}

pub fn window_perturb(f: &PLMap, w: &WindowMap) -> Result<PLMap> {
    window_perturb_many(f, std::slice::from_ref(w), &Limits::default())
}

/// Applies window perturbations on windows with pairwise disjoint interiors.
/// Continuity is required at every window endpoint interior to (0,1).
pub fn window_perturb_many(f: &PLMap, windows: &[WindowMap], limits: &Limits) -> Result<PLMap> {
    let mut order: Vec<&WindowMap> = windows.iter().collect();
    order.sort_by(|a, b| a.window.lo.cmp(&b.window.lo));
    for pair in order.windows(2) {
        if pair[1].window.lo < pair[0].window.hi {
            return Err(Error::InvalidWindow(format!("windows {} and {} overlap", pair[0].window, pair[1].window)));
        }
    }
    let mut xs: Vec<Rat> = Vec::new();
    let mut ys: Vec<Rat> = Vec::new();
    let mut pieces = 0usize;
    let mut next = 0usize; // next breakpoint of f not yet copied
    for wm in order {
        let (a, b) = (&wm.window.lo, &wm.window.hi);
        while next < f.xs().len() && &f.xs()[next] < a {
            xs.push(f.xs()[next].clone());
            ys.push(f.ys()[next].clone());
            next += 1;
        }
        let (sx, sy) = wm.absolute_points();
        pieces += composed_piece_count(f, &sx, &sy);
        if pieces > limits.lap_budget {
            return Err(Error::Budget { what: "lap", reached: pieces, limit: limits.lap_budget });
        }
        let start = xs.len();
        compose_polyline(f, &sx, &sy, &mut xs, &mut ys);
        if !a.is_zero() && ys[start] != f.eval(a) {
            return Err(Error::Continuity(format!("f(s({a})) = {} but f({a}) = {}", ys[start], f.eval(a))));
        }
        let last = ys.last().expect("window polyline is nonempty");
        if *b != Rat::one() && *last != f.eval(b) {
            return Err(Error::Continuity(format!("f(s({b})) = {last} but f({b}) = {}", f.eval(b))));
        }
        // a window starting at the previous window's end shares that vertex
        if start > 0 && xs[start - 1] == xs[start] {
            xs.remove(start);
            ys.remove(start);
        }
        while next < f.xs().len() && &f.xs()[next] <= b {
            next += 1;
        }
    }
    xs.extend(f.xs()[next..].iter().cloned());
    ys.extend(f.ys()[next..].iter().cloned());
    Ok(PLMap::new(xs, ys)?)
}

/// A random endpoint-fixing window perturbation of `f`: the window lies
/// inside one affine piece and has width at most `max_width`, and the shape
/// has an odd number, from 3 to `max_laps`, of full-window laps of random
/// widths. Coordinates have denominators at most `grain` relative to the
/// piece, so results are reproducible for a seeded `rng`.
pub fn random_window_perturbation<R: Rng + ?Sized>(
    f: &PLMap,
    rng: &mut R,
    max_width: &Rat,
    max_laps: u32,
    grain: u32,
) -> Result<(PLMap, WindowMap)> {
    if max_laps < 3 || grain < 2 || !max_width.is_positive() {
        return Err(Error::Precondition("need max_laps >= 3, grain >= 2 and a positive width".into()));
    }
    let seg = rng.gen_range(0..f.segment_count());
    let (x0, x1) = (&f.xs()[seg], &f.xs()[seg + 1]);
    let width = (x1 - x0).min_ref(max_width).clone();
    let g = i64::from(grain);
    let w = &width * Rat::new(rng.gen_range(1..=g), g);
    let slack = x1 - x0 - &w;
    let a = x0 + &slack * Rat::new(rng.gen_range(0..=g), g);
    let window = Interval::new(a.clone(), &a + &w);
    let laps = 2 * rng.gen_range(1..=(max_laps - 1) / 2) + 1;
    let denom = g * i64::from(laps);
    let mut cuts: Vec<i64> =
        sample(rng, denom as usize - 1, laps as usize - 1).into_iter().map(|c| c as i64 + 1).collect();
    cuts.sort_unstable();
    let mut boundaries = vec![window.lo.clone()];
    boundaries.extend(cuts.iter().map(|&c| &window.lo + &w * Rat::new(c, denom)));
    boundaries.push(window.hi.clone());
    let wm = WindowMap::from_laps(window, &boundaries, true, EndpointRule::Fixed)?;
    Ok((window_perturb(f, &wm)?, wm))
}
