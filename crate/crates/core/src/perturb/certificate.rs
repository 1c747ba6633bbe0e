//! Record of a nowhere-monotone construction run and its text form.

use std::fmt::Write as _;

use num_bigint::BigInt;

use crate::error::{FormatError, Result};
use crate::interval_set::Interval;
use crate::io::{parse_rat_at, tokens};
use crate::rat::Rat;

pub const CERT_HEADER: &str = "# plmap perturbation certificate v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbCertificate {
    pub epsilon: Rat,
    pub n: u32,
    /// Common denominator of the determining values of the input map.
    pub q: BigInt,
    pub tau: Rat,
    pub delta: Rat,
    /// `J_i = [(i−1)τ, iτ]` for `i = 1..=1/τ`.
    pub bands: Vec<Interval>,
    /// Windows of band `i` at index `i − 1`, left to right.
    pub windows: Vec<Vec<Interval>>,
    /// Shared window endpoints whose flanking `δ`-intervals were reflected.
    pub marked: Vec<Rat>,
    pub min_abs_slope: Rat,
    pub distance: Rat,
    pub measure_ok: bool,
    pub a_n_excluded: bool,
}

impl PerturbCertificate {
    /// Number of windows (branches) over band `i` (1-based).
    pub fn branch_count(&self, i: usize) -> usize {
        self.windows[i - 1].len()
    }

    /// The conditions a certificate claims about itself: parameter bounds
    /// plus the verdict fields.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = Rat::from_int(self.n);
        if self.tau >= &self.epsilon / Rat::from_int(3) {
            out.push(format!("tau {} is not below epsilon/3", self.tau));
        }
        let inv = self.tau.recip();
        if !inv.is_integer() || (inv.numer() % &self.q) != BigInt::from(0) {
            out.push(format!("1/tau = {inv} is not a multiple of q = {}", self.q));
        }
        if self.delta >= &self.tau / (Rat::from_int(10) * &n) {
            out.push(format!("delta {} is not below tau/(10n)", self.delta));
        }
        for w in self.windows.iter().flatten() {
            if self.delta >= w.length() / Rat::from_int(2) {
                out.push(format!("delta {} is not below half the width of window {w}", self.delta));
                break;
            }
        }
        if self.min_abs_slope <= Rat::from_int(10) * &n {
            out.push(format!("min |slope| {} is not above 10n", self.min_abs_slope));
        }
        if self.distance > self.epsilon {
            out.push(format!("distance {} exceeds epsilon {}", self.distance, self.epsilon));
        }
        if !self.measure_ok {
            out.push("output map does not preserve measure".into());
        }
        if !self.a_n_excluded {
            out.push(format!("output map lies in A_{}", self.n));
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.failures().is_empty()
    }
}

pub fn write_certificate(c: &PerturbCertificate) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{CERT_HEADER}");
    let _ = writeln!(s, "epsilon {}", c.epsilon);
    let _ = writeln!(s, "n {}", c.n);
    let _ = writeln!(s, "q {}", c.q);
    let _ = writeln!(s, "tau {}", c.tau);
    let _ = writeln!(s, "delta {}", c.delta);
    for (i, (band, ws)) in c.bands.iter().zip(&c.windows).enumerate() {
        let _ = writeln!(s, "band {} {} {}", i + 1, band.lo, band.hi);
        for w in ws {
            let _ = writeln!(s, "window {} {} {}", i + 1, w.lo, w.hi);
        }
    }
    for x in &c.marked {
        let _ = writeln!(s, "marked {x}");
    }
    let _ = writeln!(s, "min_abs_slope {}", c.min_abs_slope);
    let _ = writeln!(s, "distance {}", c.distance);
    let _ = writeln!(s, "measure_ok {}", c.measure_ok);
    let _ = writeln!(s, "a_n_excluded {}", c.a_n_excluded);
    s
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, column, message: message.into() }
}

pub fn read_certificate(text: &str) -> Result<PerturbCertificate, FormatError> {
    let mut epsilon = None;
    let mut n = None;
    let mut q = None;
    let mut tau = None;
    let mut delta = None;
    let mut bands = Vec::new();
    let mut windows: Vec<Vec<Interval>> = Vec::new();
    let mut marked = Vec::new();
    let mut min_abs_slope = None;
    let mut distance = None;
    let mut measure_ok = None;
    let mut a_n_excluded = None;
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let toks = tokens(raw);
        if toks.is_empty() || toks[0].1.starts_with('#') {
            continue;
        }
        let (kcol, key) = toks[0];
        let args = &toks[1..];
        let want = |k: usize| -> Result<(), FormatError> {
            if args.len() == k {
                Ok(())
            } else {
                Err(syntax(line, kcol, format!("`{key}` takes {k} value(s), found {}", args.len())))
            }
        };
        let rat = |i: usize| parse_rat_at(args[i].1, line, args[i].0);
        let boolean = |i: usize| match args[i].1 {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(syntax(line, args[i].0, format!("expected true or false, found `{other}`"))),
        };
        let index = |i: usize| -> Result<usize, FormatError> {
            args[i]
                .1
                .parse::<usize>()
                .ok()
                .filter(|&b| b >= 1)
                .ok_or_else(|| syntax(line, args[i].0, format!("bad band index `{}`", args[i].1)))
        };
        let interval = |a: Rat, b: Rat| {
            if a <= b {
                Ok(Interval::new(a, b))
            } else {
                Err(syntax(line, args[1].0, "interval endpoints out of order"))
            }
        };
        match key {
            "epsilon" => {
                want(1)?;
                epsilon = Some(rat(0)?);
            }
            "n" => {
                want(1)?;
                n = Some(
                    args[0]
                        .1
                        .parse::<u32>()
                        .ok()
                        .filter(|&v| v >= 1)
                        .ok_or_else(|| syntax(line, args[0].0, "n must be a positive integer"))?,
                );
            }
            "q" => {
                want(1)?;
                q = Some(args[0].1.parse::<BigInt>().map_err(|_| syntax(line, args[0].0, "q must be an integer"))?);
            }
            "tau" => {
                want(1)?;
                tau = Some(rat(0)?);
            }
            "delta" => {
                want(1)?;
                delta = Some(rat(0)?);
            }
            "band" => {
                want(3)?;
                let i = index(0)?;
                if i != bands.len() + 1 {
                    return Err(syntax(line, args[0].0, format!("expected band {}, found {i}", bands.len() + 1)));
                }
                bands.push(interval(rat(1)?, rat(2)?)?);
                windows.push(Vec::new());
            }
            "window" => {
                want(3)?;
                let i = index(0)?;
                if i != bands.len() {
                    return Err(syntax(line, args[0].0, format!("window for band {i} outside its band block")));
                }
                windows[i - 1].push(interval(rat(1)?, rat(2)?)?);
            }
            "marked" => {
                want(1)?;
                marked.push(rat(0)?);
            }
            "min_abs_slope" => {
                want(1)?;
                min_abs_slope = Some(rat(0)?);
            }
            "distance" => {
                want(1)?;
                distance = Some(rat(0)?);
            }
            "measure_ok" => {
                want(1)?;
                measure_ok = Some(boolean(0)?);
            }
            "a_n_excluded" => {
                want(1)?;
                a_n_excluded = Some(boolean(0)?);
            }
            other => return Err(syntax(line, kcol, format!("unknown key `{other}`"))),
        }
    }
    let end = last_line + 1;
    let missing = |k: &str| syntax(end, 1, format!("missing `{k}`"));
    Ok(PerturbCertificate {
        epsilon: epsilon.ok_or_else(|| missing("epsilon"))?,
        n: n.ok_or_else(|| missing("n"))?,
        q: q.ok_or_else(|| missing("q"))?,
        tau: tau.ok_or_else(|| missing("tau"))?,
        delta: delta.ok_or_else(|| missing("delta"))?,
        bands,
        windows,
        marked,
        min_abs_slope: min_abs_slope.ok_or_else(|| missing("min_abs_slope"))?,
        distance: distance.ok_or_else(|| missing("distance"))?,
        measure_ok: measure_ok.ok_or_else(|| missing("measure_ok"))?,
        a_n_excluded: a_n_excluded.ok_or_else(|| missing("a_n_excluded"))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::r;

    fn sample() -> PerturbCertificate {
        PerturbCertificate {
            epsilon: r(1, 2),
            n: 1,
            q: BigInt::from(1),
            tau: r(1, 7),
            delta: r(1, 280),
            bands: (1..=7).map(|i| Interval::new(r(i - 1, 7), r(i, 7))).collect(),
            windows: (1..=7).map(|i| vec![Interval::new(r(i - 1, 7), r(i, 7))]).collect(),
            marked: (1..7).map(|i| r(i, 7)).collect(),
            min_abs_slope: r(80, 1),
            distance: r(2, 7),
            measure_ok: true,
            a_n_excluded: true,
        }
    }

    #[test]
    fn round_trip() {
        let c = sample();
        let text = write_certificate(&c);
        assert!(text.contains("tau 1/7\n"));
        assert_eq!(read_certificate(&text).unwrap(), c);
        assert!(c.is_valid());
        assert_eq!(c.branch_count(3), 1);
    }

    #[test]
    fn failures_are_named() {
        let mut c = sample();
        c.distance = r(3, 5);
        c.tau = r(1, 6);
        let f = c.failures();
        assert_eq!(f.len(), 2, "{f:?}");
        c.delta = r(1, 50);
        c.min_abs_slope = r(10, 1);
        assert_eq!(c.failures().len(), 4);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let text = write_certificate(&sample()).replace("delta 1/280", "delta 0.5");
        match read_certificate(&text) {
            Err(FormatError::Syntax { line: 6, column: 7, .. }) => {}
            other => panic!("{other:?}"),
        }
        let text = write_certificate(&sample()).replace("measure_ok true\n", "");
        assert!(read_certificate(&text).is_err());
        assert!(read_certificate("bogus 1\n").is_err());
    }
}
