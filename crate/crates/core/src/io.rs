//! Text serialization of maps.
//!
//! One breakpoint per line, `x y`, each coordinate as `p/q` in lowest terms
//! (integers may be written as `p`). Blank lines and lines starting with `#`
//! are ignored.

use std::fmt::Write as _;

use crate::error::{FormatError, MapError};
use crate::plmap::PLMap;
use crate::rat::Rat;

pub const MAP_HEADER: &str = "# plmap v1: one breakpoint per line, x y";

pub fn write_map(f: &PLMap) -> String {
    let mut out = String::new();
    out.push_str(MAP_HEADER);
    out.push('\n');
    for (x, y) in f.points() {
        writeln!(out, "{x} {y}").expect("writing to a String");
    }
    out
}

struct Record {
    line: usize,
    x_col: usize,
    y_col: usize,
    x: Rat,
    y: Rat,
}

/// Splits a line into whitespace-separated tokens with 1-based columns.
pub(crate) fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

pub(crate) fn parse_rat_at(tok: &str, line: usize, column: usize) -> Result<Rat, FormatError> {
    tok.parse::<Rat>().map_err(|e| FormatError::Syntax { line, column, message: e.to_string() })
}

pub fn read_map(text: &str) -> Result<PLMap, FormatError> {
    let mut records = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks = tokens(raw);
        if toks.len() != 2 {
            let column = toks.get(2).map_or(raw.len() + 1, |t| t.0);
            return Err(FormatError::Syntax {
                line,
                column,
                message: format!("expected two coordinates `x y`, found {} tokens", toks.len()),
            });
        }
        let x = parse_rat_at(toks[0].1, line, toks[0].0)?;
        let y = parse_rat_at(toks[1].1, line, toks[1].0)?;
        records.push(Record { line, x_col: toks[0].0, y_col: toks[1].0, x, y });
    }
    let (xs, ys): (Vec<Rat>, Vec<Rat>) = records.iter().map(|r| (r.x.clone(), r.y.clone())).unzip();
    PLMap::new(xs, ys).map_err(|source| {
        let at = |i: usize, y: bool| {
            records.get(i).map_or((text.lines().count().max(1), 1), |r| (r.line, if y { r.y_col } else { r.x_col }))
        };
        let (line, column) = match &source {
            MapError::TooFewPoints | MapError::LengthMismatch { .. } => at(records.len(), false),
            MapError::BadStart(_) => at(0, false),
            MapError::BadEnd(_) => at(records.len() - 1, false),
            MapError::NotIncreasing { index, .. } => at(*index, false),
            MapError::OutOfRange { index, .. } => at(*index, true),
            MapError::ZeroSlope { index, .. } => at(*index + 1, true),
        };
        FormatError::Map { line, column, source }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::r;

    #[test]
    fn writes_lowest_terms() {
        let s = write_map(&PLMap::skeleton());
        assert!(s.contains("\n0 1/3\n1/4 1\n2/3 1/3\n5/6 0\n1 1/3\n"));
        assert_eq!(read_map(&s).unwrap(), PLMap::skeleton());
    }

    #[test]
    fn accepts_unreduced_and_p_over_one() {
        let m = read_map("0/1 0\n  2/4 1/1\n# comment\n\n1 0\n").unwrap();
        assert_eq!(m, PLMap::tent());
    }

    #[test]
    fn rejects_with_positions() {
        let e = read_map("0 0\n1/2 1\n1/3 0\n1 1\n").unwrap_err();
        assert_eq!(
            e,
            FormatError::Map { line: 3, column: 1, source: MapError::NotIncreasing { index: 2, x: r(1, 3) } }
        );
        let e = read_map("0 0\n1/2   3/2\n1 0\n").unwrap_err();
        assert!(matches!(e, FormatError::Map { line: 2, column: 7, source: MapError::OutOfRange { .. } }));
        let e = read_map("# hdr\n0 0\n1/2 1\n3/4 1\n1 0\n").unwrap_err();
        assert!(matches!(e, FormatError::Map { line: 4, column: 5, source: MapError::ZeroSlope { index: 1, .. } }));
        let e = read_map("0 0\n1/2 0.5\n").unwrap_err();
        assert!(matches!(e, FormatError::Syntax { line: 2, column: 5, .. }));
        let e = read_map("0 0 0\n").unwrap_err();
        assert!(matches!(e, FormatError::Syntax { line: 1, column: 5, .. }));
    }
}
