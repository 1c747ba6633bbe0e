//! The nowhere-monotone perturbation.
//!
//! Given a measure-preserving `f`, `n` and `ε`, builds a measure-preserving
//! `F` with `ρ(f, F) ≤ ε` and `F ∉ A_n`:
//!
//! 1. Cut the range into bands of width `τ`, with `1/τ` a multiple of the
//!    common denominator of the determining values, so every determining
//!    value is a band boundary. The windows are the maximal intervals on
//!    which `f` maps affinely onto one band.
//! 2. Replace `f` on every window by `f ∘ s`, where `s` sweeps the window
//!    back and forth in laps of width at most `δ/3`. Where two windows of
//!    different bands meet at `x`, the `δ`-intervals on either side of `x`
//!    carry exactly two laps of width `δ/2` instead.
//! 3. Reflect those two-lap pieces about the level `f(x)`. The two sides
//!    trade bands, which leaves every fibre weight unchanged.
//!
//! Where a window touches 0 (resp. 1) and `f` increases on it, `s` starts
//! (resp. ends) at the far endpoint, so `F` falls steeply there.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::interval_set::Interval;
use crate::measure::check_measure_preserving;
use crate::perturb::certificate::PerturbCertificate;
use crate::perturb::monotone::decide_a_n;
use crate::perturb::snap::snap_determining_values;
use crate::perturb::window::{window_perturb_many, EndpointRule, WindowMap};
use crate::plmap::{determining_values, preimage_point, sup_distance, PLMap};
use crate::rat::Rat;
use crate::Limits;

/// `F = 2c − f` on `[d, e]`, where `c = f(d) = f(e)`.
pub fn reflect_on_interval(f: &PLMap, d: &Rat, e: &Rat) -> Result<PLMap> {
    if d > e {
        return Err(Error::InvalidWindow(format!("reflection interval [{d}, {e}] is reversed")));
    }
    reflect_on_intervals(f, &[Interval::new(d.clone(), e.clone())])
}

/// Reflection on several intervals with pairwise disjoint interiors.
pub fn reflect_on_intervals(f: &PLMap, parts: &[Interval]) -> Result<PLMap> {
    let mut parts: Vec<&Interval> = parts.iter().collect();
    parts.sort_by(|a, b| a.lo.cmp(&b.lo));
    let mut levels = Vec::with_capacity(parts.len());
    for (k, j) in parts.iter().enumerate() {
        if !j.is_subset_of_unit() {
            return Err(Error::Domain(if j.lo.is_negative() { j.lo.clone() } else { j.hi.clone() }));
        }
        if k > 0 && j.lo < parts[k - 1].hi {
            return Err(Error::InvalidWindow(format!("reflection intervals {} and {j} overlap", parts[k - 1])));
        }
        let (fd, fe) = (f.eval(&j.lo), f.eval(&j.hi));
        if fd != fe {
            return Err(Error::Continuity(format!("f({}) = {fd} but f({}) = {fe}", j.lo, j.hi)));
        }
        levels.push(fd);
    }
    let mut xs: Vec<Rat> = f.xs().to_vec();
    for j in &parts {
        xs.push(j.lo.clone());
        xs.push(j.hi.clone());
    }
    xs.sort();
    xs.dedup();
    let mut ys = Vec::with_capacity(xs.len());
    for x in &xs {
        let y = f.eval(x);
        let k = parts.partition_point(|j| j.lo < *x);
        if k > 0 && *x < parts[k - 1].hi {
            let c = &levels[k - 1];
            let ry = c + c - &y;
            if !ry.in_unit() {
                return Err(Error::Range(format!("reflection about {c} sends {y} to {ry} at x = {x}")));
            }
            ys.push(ry);
        } else {
            ys.push(y);
        }
    }
    Ok(PLMap::new(xs, ys)?)
}

/// Tuning of [`nowhere_monotone_perturb`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbConfig {
    /// `δ = factor · min(τ/(10n), half the narrowest window)`; must lie in (0,1).
    pub delta_factor: Rat,
    pub limits: Limits,
    /// Snap the determining values to this grid before building bands.
    pub snap_grid: Option<u64>,
}

impl Default for PerturbConfig {
    fn default() -> Self {
        PerturbConfig { delta_factor: Rat::half(), limits: Limits::default(), snap_grid: None }
    }
}

/// A maximal interval on which `f` maps affinely onto one band.
#[derive(Debug, Clone)]
struct BandWindow {
    band: usize,
    span: Interval,
    increasing: bool,
}

/// Windows of the `τ`-band decomposition, left to right. Requires every
/// determining value to be a multiple of `τ`.
fn band_windows(f: &PLMap, tau: &Rat) -> Result<Vec<BandWindow>> {
    let mut out = Vec::new();
    let pts: Vec<(&Rat, &Rat)> = f.points().collect();
    for w in pts.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        let steps = (y1 - y0).abs() / tau;
        if !steps.is_integer() {
            return Err(Error::Precondition(format!("value {y1} is not on the band grid of width {tau}")));
        }
        let steps = steps.numer().to_usize().expect("step count fits");
        let increasing = y1 > y0;
        let dx = x1 - x0;
        let band0 = (y0.min_ref(y1) / tau).floor();
        for j in 0..steps {
            let a = x0 + &dx * Rat::new(j, steps);
            let b = x0 + &dx * Rat::new(j + 1, steps);
            let offset = if increasing { j } else { steps - 1 - j };
            let band = (&band0 + BigInt::from(offset + 1)).to_usize().expect("band index fits");
            out.push(BandWindow { band, span: Interval::new(a, b), increasing });
        }
    }
    Ok(out)
}

/// Lap boundaries of `s` on one window.
fn lap_boundaries(span: &Interval, delta: &Rat, mark_lo: bool, mark_hi: bool, odd: bool) -> Vec<Rat> {
    let half = delta / Rat::from_int(2);
    let lo = if mark_lo { &span.lo + delta } else { span.lo.clone() };
    let hi = if mark_hi { &span.hi - delta } else { span.hi.clone() };
    let inner = &hi - &lo;
    let marks = usize::from(mark_lo) + usize::from(mark_hi);
    let mut k = (Rat::from_int(3) * &inner / delta).ceil().to_usize().expect("lap count fits").max(1);
    if (2 * marks + k) % 2 != usize::from(odd) {
        k += 1;
    }
    let mut out = Vec::with_capacity(2 * marks + k + 1);
    out.push(span.lo.clone());
    if mark_lo {
        out.push(&span.lo + &half);
        out.push(lo.clone());
    }
    let step = &inner / Rat::from_int(k as u64);
    for j in 1..k {
        out.push(&lo + &step * Rat::from_int(j as u64));
    }
    out.push(hi);
    if mark_hi {
        out.push(&span.hi - &half);
        out.push(span.hi.clone());
    }
    out
}

/// Result of [`nowhere_monotone_perturb`].
#[derive(Debug, Clone)]
pub struct NowhereMonotone {
    pub map: PLMap,
    /// The window perturbation before the reflections.
    pub intermediate: PLMap,
    pub certificate: PerturbCertificate,
}

/// Builds `F` and its certificate. The certificate's verdict fields are
/// computed from `F` by the exact checkers, so a run that falls short of a
/// bound is reported there rather than as an error.
pub fn nowhere_monotone_perturb(f: &PLMap, n: u32, epsilon: &Rat, config: &PerturbConfig) -> Result<NowhereMonotone> {
    if n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    if !epsilon.is_positive() {
        return Err(Error::Precondition(format!("epsilon {epsilon} must be positive")));
    }
    if !(config.delta_factor.is_positive() && config.delta_factor < Rat::one()) {
        return Err(Error::Precondition(format!("delta factor {} must lie in (0,1)", config.delta_factor)));
    }
    if let Some(w) = check_measure_preserving(f).witness {
        return Err(Error::Precondition(format!(
            "input does not preserve measure: band ({}, {}) has fibre weight {}",
            w.band.lo, w.band.hi, w.weight_sum
        )));
    }

    // I. bands and windows
    let base = match config.snap_grid {
        Some(grid) => snap_determining_values(f, grid)?,
        None => f.clone(),
    };
    let dv = determining_values(&base);
    let q = Rat::common_denominator(&dv);
    let qr = Rat::from(q.clone());
    // smallest M with qM > 3/ε, so τ = 1/(qM) < ε/3
    let bound = Rat::from_int(3) / epsilon;
    let m = (&bound / &qr).floor() + BigInt::from(1);
    let tau = (&qr * Rat::from(m)).recip();
    if tau >= epsilon / Rat::from_int(3) {
        return Err(Error::Infeasible(format!("no band width below {epsilon}/3")));
    }
    let band_count = tau
        .recip()
        .numer()
        .to_usize()
        .ok_or_else(|| Error::Infeasible(format!("1/τ = {} is too large", tau.recip())))?;
    if band_count > config.limits.lap_budget {
        return Err(Error::Budget { what: "lap", reached: band_count, limit: config.limits.lap_budget });
    }
    let windows = band_windows(&base, &tau)?;
    let bands: Vec<Interval> = (0..band_count)
        .map(|i| Interval::new(&tau * Rat::from_int(i as u64), &tau * Rat::from_int(i as u64 + 1)))
        .collect();
    let mut per_band: Vec<Vec<Interval>> = vec![Vec::new(); band_count];
    for w in &windows {
        per_band[w.band - 1].push(w.span.clone());
    }
    for c in &dv {
        if !(c / &tau).is_integer() {
            return Err(Error::Precondition(format!("determining value {c} lies inside a band")));
        }
    }
    for (band, ws) in bands.iter().zip(&per_band) {
        let fibre = preimage_point(&base, &band.midpoint()).len();
        if fibre != ws.len() {
            return Err(Error::Precondition(format!(
                "band {band} has {fibre} preimages of its midpoint but {} windows",
                ws.len()
            )));
        }
        for w in ws {
            let (a, b) = (base.eval(&w.lo), base.eval(&w.hi));
            let image = Interval::new(a.min_ref(&b).clone(), a.max_ref(&b).clone());
            if image != *band {
                return Err(Error::Precondition(format!("window {w} maps onto {image}, not {band}")));
            }
        }
    }

    // II. laps
    let pass_through: Vec<bool> = windows.windows(2).map(|p| p[0].band != p[1].band).collect();
    let marked: Vec<Rat> =
        windows.windows(2).zip(&pass_through).filter(|(_, &pt)| pt).map(|(p, _)| p[0].span.hi.clone()).collect();
    let narrowest = windows.iter().map(|w| w.span.length()).min().expect("at least one window");
    let cap = (&tau / Rat::from_int(10 * u64::from(n))).min_ref(&(&narrowest / Rat::from_int(2))).clone();
    let delta = &config.delta_factor * &cap;
    let mut maps = Vec::with_capacity(windows.len());
    let mut total_laps = 0usize;
    for (k, w) in windows.iter().enumerate() {
        let mark_lo = k > 0 && pass_through[k - 1];
        let mark_hi = k + 1 < windows.len() && pass_through[k];
        let waive_lo = w.span.lo.is_zero() && w.increasing;
        let waive_hi = w.span.hi == Rat::one() && w.increasing;
        let (start_at_lo, end_at_hi) = (!waive_lo, !waive_hi);
        let laps = lap_boundaries(&w.span, &delta, mark_lo, mark_hi, start_at_lo == end_at_hi);
        total_laps += laps.len() - 1;
        if total_laps > config.limits.lap_budget {
            return Err(Error::Budget { what: "lap", reached: total_laps, limit: config.limits.lap_budget });
        }
        let rule = if waive_lo || waive_hi { EndpointRule::Waived } else { EndpointRule::Fixed };
        maps.push(WindowMap::from_laps(w.span.clone(), &laps, start_at_lo, rule)?);
    }
    let intermediate = window_perturb_many(&base, &maps, &config.limits)?;

    // III. reflections
    let mut flips = Vec::with_capacity(2 * marked.len());
    for x in &marked {
        flips.push(Interval::new(x - &delta, x.clone()));
        flips.push(Interval::new(x.clone(), x + &delta));
    }
    let map = reflect_on_intervals(&intermediate, &flips)?;

    let decision = decide_a_n(&map, n, &config.limits)?;
    let certificate = PerturbCertificate {
        epsilon: epsilon.clone(),
        n,
        q,
        tau,
        delta,
        bands,
        windows: per_band,
        marked,
        min_abs_slope: map.min_abs_slope(),
        distance: sup_distance(f, &map),
        measure_ok: check_measure_preserving(&map).preserving,
        a_n_excluded: decision.excluded(),
    };
    Ok(NowhereMonotone { map, intermediate, certificate })
}

/// Rechecks a certificate against the input `f` and output `F` alone:
/// recomputes the slope bound, the distance, measure preservation and
/// `A_n` exclusion, and the parameter bounds. Returns the list of failures.
pub fn validate_certificate(f: &PLMap, big_f: &PLMap, cert: &PerturbCertificate) -> Result<Vec<String>> {
    let mut out = cert.failures();
    let slope = big_f.slopes().into_iter().map(|s| s.abs()).min().expect("a map has at least one piece");
    if slope != cert.min_abs_slope {
        out.push(format!("recorded min |slope| {} but F has {slope}", cert.min_abs_slope));
    }
    let dist = sup_distance(f, big_f);
    if dist != cert.distance {
        out.push(format!("recorded distance {} but ρ(f, F) = {dist}", cert.distance));
    }
    let preserving = crate::measure::is_measure_preserving(big_f);
    if preserving != cert.measure_ok {
        out.push(format!("recorded measure_ok = {} but the check gives {preserving}", cert.measure_ok));
    }
    let excluded = decide_a_n(big_f, cert.n, &Limits::default())?.excluded();
    if excluded != cert.a_n_excluded {
        out.push(format!("recorded a_n_excluded = {} but the decision gives {excluded}", cert.a_n_excluded));
    }
    if cert.bands.len() != cert.windows.len() {
        out.push("band and window lists differ in length".into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::is_measure_preserving;
    use crate::perturb::monotone::verify_a_n_witness;
    use crate::rat::r;

    #[test]
    fn reflection_examples() {
        // two-lap bump on [1/4, 3/4]: 1/2 -> 3/4 -> 1/2, inside id elsewhere is not
        // continuous, so build the bump into a full map
        let f = PLMap::from_points(vec![
            (r(0, 1), r(0, 1)),
            (r(1, 4), r(1, 2)),
            (r(1, 2), r(3, 4)),
            (r(3, 4), r(1, 2)),
            (r(1, 1), r(1, 1)),
        ])
        .unwrap();
        let g = reflect_on_interval(&f, &r(1, 4), &r(3, 4)).unwrap();
        assert_eq!(g.eval(&r(1, 2)), r(1, 4));
        assert_eq!(g.eval(&r(0, 1)), r(0, 1));
        assert_eq!(reflect_on_interval(&g, &r(1, 4), &r(3, 4)).unwrap(), f);
        assert!(matches!(reflect_on_interval(&f, &r(0, 1), &r(1, 2)), Err(Error::Continuity(_))));
        // reflecting the tent about its value at 1/4 and 3/4 would reach 0
        let t = PLMap::tent();
        assert_eq!(reflect_on_interval(&t, &r(1, 4), &r(3, 4)).unwrap().eval(&r(1, 2)), r(0, 1));
        assert!(matches!(reflect_on_interval(&t, &r(1, 8), &r(7, 8)), Err(Error::Range(_))));
    }

    #[test]
    fn lap_layout() {
        let span = Interval::new(r(0, 1), r(1, 4));
        let b = lap_boundaries(&span, &r(1, 40), true, true, true);
        assert_eq!(&b[..3], &[r(0, 1), r(1, 80), r(1, 40)]);
        assert_eq!(&b[b.len() - 3..], &[r(9, 40), r(19, 80), r(1, 4)]);
        let laps = b.len() - 1;
        assert_eq!(laps % 2, 1);
        for w in b[2..b.len() - 2].windows(2) {
            assert!(&w[1] - &w[0] <= r(1, 120));
        }
        let even = lap_boundaries(&span, &r(1, 40), false, true, false);
        assert_eq!((even.len() - 1) % 2, 0);
    }

    #[test]
    fn windows_of_skeleton() {
        let ws = band_windows(&PLMap::skeleton(), &r(1, 3)).unwrap();
        let bands: Vec<usize> = ws.iter().map(|w| w.band).collect();
        assert_eq!(bands, vec![2, 3, 3, 2, 1, 1]);
        assert_eq!(ws[0].span, Interval::new(r(0, 1), r(1, 8)));
    }

    #[test]
    fn identity_n1() {
        let id = PLMap::identity();
        let out = nowhere_monotone_perturb(&id, 1, &r(1, 2), &PerturbConfig::default()).unwrap();
        let c = &out.certificate;
        assert!(c.min_abs_slope > r(10, 1));
        assert!(c.distance <= r(1, 2));
        assert!(c.measure_ok && c.a_n_excluded, "{:?}", c.failures());
        assert!(is_measure_preserving(&out.intermediate));
        assert!(validate_certificate(&id, &out.map, c).unwrap().is_empty());
        for x in out.map.xs() {
            assert!(!verify_a_n_witness(&out.map, 1, x).unwrap());
        }
    }

    #[test]
    fn tent_n2() {
        let out = nowhere_monotone_perturb(&PLMap::tent(), 2, &r(3, 10), &PerturbConfig::default()).unwrap();
        assert!(out.certificate.min_abs_slope > r(20, 1));
        assert!(out.certificate.is_valid(), "{:?}", out.certificate.failures());
    }

    #[test]
    fn skeleton_tau() {
        let out = nowhere_monotone_perturb(&PLMap::skeleton(), 1, &r(1, 4), &PerturbConfig::default()).unwrap();
        let c = &out.certificate;
        assert_eq!(c.q, BigInt::from(3));
        assert!(c.tau <= r(1, 12) && c.tau < r(1, 12));
        assert!((c.tau.recip() / r(3, 1)).is_integer());
        assert!(c.is_valid(), "{:?}", c.failures());
    }

    #[test]
    fn rejects_bad_input() {
        let bad = PLMap::from_points(vec![(r(0, 1), r(0, 1)), (r(1, 2), r(1, 1)), (r(1, 1), r(1, 2))]).unwrap();
        assert!(nowhere_monotone_perturb(&bad, 1, &r(1, 2), &PerturbConfig::default()).is_err());
        assert!(nowhere_monotone_perturb(&PLMap::tent(), 1, &r(0, 1), &PerturbConfig::default()).is_err());
        let tight =
            PerturbConfig { limits: Limits { lap_budget: 10, ..Limits::default() }, ..PerturbConfig::default() };
        assert!(matches!(
            nowhere_monotone_perturb(&PLMap::tent(), 1, &r(1, 2), &tight),
            Err(Error::Budget { what: "lap", .. })
        ));
    }
}
