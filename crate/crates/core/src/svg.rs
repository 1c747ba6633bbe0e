//! Deterministic SVG renderings: map graphs and entropy curves.
//!
//! Coordinates are integers on a `GRID × GRID` canvas, rounded from exact
//! rationals, so identical inputs give byte-identical files.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::perturb::PerturbCertificate;
use crate::plmap::PLMap;
use crate::rat::Rat;

pub const GRID: i64 = 1_000_000;
const MARGIN: i64 = GRID / 20;

/// `x · GRID`, rounded half up.
fn to_grid(x: &Rat) -> i64 {
    let scaled = x.numer() * BigInt::from(2 * GRID) + x.denom();
    let v: BigInt = scaled.div_floor(&(x.denom() * BigInt::from(2)));
    i64::try_from(v).unwrap_or(i64::MAX)
}

fn header(s: &mut String) {
    let side = GRID + 2 * MARGIN;
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {side} {side}" width="600" height="600">"#,
        -MARGIN, -MARGIN
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{GRID}" height="{GRID}" fill="none" stroke="black" stroke-width="{}"/>"#,
        GRID / 500
    );
}

/// The graph of `f` with the y axis pointing up. With a certificate, the
/// band boundaries at multiples of `τ` are drawn as faint horizontal lines.
pub fn map_svg(f: &PLMap, certificate: Option<&PerturbCertificate>) -> String {
    let mut s = String::new();
    header(&mut s);
    if let Some(cert) = certificate {
        let _ = writeln!(s, r##"<g stroke="#bbbbbb" stroke-width="{}">"##, GRID / 2000);
        for band in cert.bands.iter().skip(1) {
            let y = GRID - to_grid(&band.lo);
            let _ = writeln!(s, r#"<line x1="0" y1="{y}" x2="{GRID}" y2="{y}"/>"#);
        }
        let _ = writeln!(s, "</g>");
    }
    let pts: Vec<String> = f.points().map(|(x, y)| format!("{},{}", to_grid(x), GRID - to_grid(y))).collect();
    let _ = writeln!(
        s,
        r##"<polyline fill="none" stroke="#1f4e9c" stroke-width="{}" points="{}"/>"##,
        GRID / 400,
        pts.join(" ")
    );
    s.push_str("</svg>\n");
    s
}

/// One polyline per partition index `i`, plotting `h` against `n`.
/// The vertical axis spans `[0, max h]`.
pub fn entropy_svg(rows: &[(u32, u32, f64)]) -> String {
    const COLORS: [&str; 6] = ["#1f4e9c", "#c0392b", "#27ae60", "#8e44ad", "#d68910", "#34495e"];
    let mut s = String::new();
    header(&mut s);
    let n_max = rows.iter().map(|r| r.1).max().unwrap_or(1).max(2);
    let h_max = rows.iter().map(|r| r.2).fold(0.0f64, f64::max);
    let h_max = if h_max > 0.0 { h_max } else { 1.0 };
    let mut indices: Vec<u32> = rows.iter().map(|r| r.0).collect();
    indices.sort_unstable();
    indices.dedup();
    for (k, i) in indices.iter().enumerate() {
        let pts: Vec<String> = rows
            .iter()
            .filter(|r| r.0 == *i)
            .map(|&(_, n, h)| {
                let x = (n as i64 - 1) * GRID / (n_max as i64 - 1);
                let y = GRID - (h / h_max * GRID as f64).round() as i64;
                format!("{x},{y}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="{}" points="{}"><title>i = {i}</title></polyline>"#,
            COLORS[k % COLORS.len()],
            GRID / 400,
            pts.join(" ")
        );
    }
    s.push_str("</svg>\n");
    s
}
