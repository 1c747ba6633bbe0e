//! The command pipelines behind the `plmap` binary: configuration, map
//! construction specs, and the text artifacts each verb produces.
//! Everything here is deterministic given the configuration and inputs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::analyze::{b0_set, level_set, scale_diagnostics, LevelCount};
use crate::entropy::{
    entropy_profile, q_beta_certificate, EntropyConfig, EntropyProfile, ProfileOptions, QBetaWitness,
};
use crate::error::{Error, FormatError, Result};
use crate::interval_set::Interval;
use crate::io::{parse_rat_at, write_map};
use crate::measure::{band_weights, check_measure_preserving};
use crate::perturb::{
    nowhere_monotone_perturb, random_window_perturbation, regular_window_shape, snap_determining_values,
    validate_certificate, window_perturb, write_certificate, PerturbConfig,
};
use crate::plmap::{sup_distance, PLMap};
use crate::rat::Rat;
use crate::Limits;

/// Environment variable that overrides `output_dir`.
pub const OUTPUT_DIR_ENV: &str = "PLMAP_OUTPUT_DIR";

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub lap_budget: usize,
    pub cut_budget: usize,
    pub cell_budget: usize,
    pub log_precision_digits: u32,
    pub output_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let limits = Limits::default();
        PipelineConfig {
            seed: 0,
            lap_budget: limits.lap_budget,
            cut_budget: limits.cut_budget,
            cell_budget: limits.cell_budget,
            log_precision_digits: crate::entropy::DEFAULT_DIGITS,
            output_dir: PathBuf::from("."),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<PipelineConfig> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map(|s| line_col(text, s.start)).unwrap_or((1, 1));
            Error::Format(FormatError::Syntax { line, column, message: e.message().to_string() })
        })
    }

    pub fn load(path: &Path) -> Result<PipelineConfig> {
        PipelineConfig::from_toml(&read_text(path)?)
    }

    /// Applies the output-directory override from the environment.
    pub fn with_env(mut self) -> PipelineConfig {
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
            self.output_dir = PathBuf::from(dir);
        }
        self
    }

    pub fn limits(&self) -> Limits {
        Limits { lap_budget: self.lap_budget, cut_budget: self.cut_budget, cell_budget: self.cell_budget }
    }

    pub fn entropy_config(&self) -> EntropyConfig {
        EntropyConfig { digits: self.log_precision_digits, limits: self.limits() }
    }

    /// Relative output paths are taken relative to `output_dir`.
    pub fn output_path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.output_dir.join(p)
        }
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn syntax(column: usize, message: impl Into<String>) -> Error {
    Error::Format(FormatError::Syntax { line: 1, column, message: message.into() })
}

fn parse_count(tok: &str, column: usize, what: &str) -> Result<u32> {
    tok.strip_prefix("m=")
        .unwrap_or(tok)
        .parse::<u32>()
        .ok()
        .filter(|&m| m >= 1)
        .ok_or_else(|| syntax(column, format!("{what} must be a positive integer, found `{tok}`")))
}

/// Builds a map from a one-line construction spec:
///
/// * `id`, `flip` (also `1-id`), `tent` (also `T`), `skeleton` (also `B`)
/// * `zigzag M` (also `zigzag m=M`)
/// * `from-breakpoints "x:y, x:y, …"`
/// * `random-window BASE K`: `K` successive random window perturbations of
///   the named base map, drawn from `seed`
///
/// Errors carry the column of the offending token.
pub fn build_map(spec: &str, seed: u64) -> Result<PLMap> {
    let spec = spec.trim_end();
    let lead = spec.len() - spec.trim_start().len();
    let word_end = spec[lead..].find(char::is_whitespace).map_or(spec.len(), |i| lead + i);
    let (name, rest) = (&spec[lead..word_end], &spec[word_end..]);
    let rest_col = word_end + 1 + (rest.len() - rest.trim_start().len());
    let rest = rest.trim();
    let no_args = |m: PLMap| {
        if rest.is_empty() {
            Ok(m)
        } else {
            Err(syntax(rest_col, format!("`{name}` takes no arguments")))
        }
    };
    match name {
        "id" | "identity" => no_args(PLMap::identity()),
        "flip" | "1-id" => no_args(PLMap::flip()),
        "tent" | "T" => no_args(PLMap::tent()),
        "skeleton" | "B" => no_args(PLMap::skeleton()),
        "zigzag" => Ok(PLMap::zigzag(parse_count(rest, rest_col, "zigzag lap count")?)),
        "from-breakpoints" => parse_breakpoints(rest, rest_col),
        "random-window" => {
            let mut it = rest.split_whitespace();
            let (base, k) = (it.next(), it.next());
            let (Some(base), Some(k), None) = (base, k, it.next()) else {
                return Err(syntax(rest_col, "expected `random-window BASE K`"));
            };
            let k_col = rest_col + rest.find(k).unwrap_or(0);
            let k = parse_count(k, k_col, "perturbation count")?;
            let mut f = build_map(base, seed)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..k {
                f = random_window_perturbation(&f, &mut rng, &Rat::new(1, 4), 7, 8)?.0;
            }
            Ok(f)
        }
        "" => Err(syntax(1, "empty map spec")),
        other => Err(syntax(lead + 1, format!("unknown map `{other}`"))),
    }
}

/// Reads a map file when `arg` names an existing file, and otherwise treats
/// `arg` as a construction spec for [`build_map`].
pub fn load_map(arg: &str, seed: u64) -> Result<PLMap> {
    let path = Path::new(arg);
    if path.is_file() {
        return Ok(crate::io::read_map(&read_text(path)?)?);
    }
    build_map(arg, seed)
}

/// `x:y` pairs separated by commas, optionally quoted.
fn parse_breakpoints(text: &str, column: usize) -> Result<PLMap> {
    let (body, mut col) = match text.strip_prefix('"').and_then(|t| t.strip_suffix('"')) {
        Some(inner) => (inner, column + 1),
        None => (text, column),
    };
    let mut points = Vec::new();
    let mut columns = Vec::new();
    for part in body.split(',') {
        let lead = part.len() - part.trim_start().len();
        let item = part.trim();
        let item_col = col + lead;
        let Some((x, y)) = item.split_once(':') else {
            return Err(syntax(item_col, format!("expected `x:y`, found `{item}`")));
        };
        let x = parse_rat_at(x.trim(), 1, item_col).map_err(Error::Format)?;
        let y_col = item_col + item.find(':').expect("split succeeded") + 1;
        let y = parse_rat_at(y.trim(), 1, y_col).map_err(Error::Format)?;
        points.push((x, y));
        columns.push((item_col, y_col));
        col += part.len() + 1;
    }
    PLMap::from_points(points).map_err(|source| {
        use crate::error::MapError::*;
        let column = match &source {
            NotIncreasing { index, .. } => columns[*index].0,
            OutOfRange { index, .. } => columns[*index].1,
            ZeroSlope { index, .. } => columns[*index + 1].1,
            BadStart(_) => columns[0].0,
            BadEnd(_) => columns[columns.len() - 1].0,
            _ => column,
        };
        Error::Format(FormatError::Map { line: 1, column, source })
    })
}

/// Text report of the fibre-weight check; the boolean is the verdict.
pub fn verify_report(f: &PLMap) -> (bool, String) {
    let verdict = check_measure_preserving(f);
    let mut s = String::new();
    let _ = writeln!(s, "segments {}", f.segment_count());
    for b in band_weights(f) {
        let mark = if b.weight_sum == Rat::one() { "ok" } else { "FAIL" };
        let _ = writeln!(s, "band {} {} weight {} {mark}", b.band.lo, b.band.hi, b.weight_sum);
    }
    let _ = writeln!(s, "preserving {}", verdict.preserving);
    (verdict.preserving, s)
}

/// Parameters of the `perturb` verb.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PerturbMode {
    Window { window: Interval, m: u32 },
    Snap { grid: u64 },
    NowhereMonotone { n: u32, epsilon: Rat },
}

#[derive(Debug, Clone)]
pub struct PerturbOutput {
    pub map: PLMap,
    pub certificate: String,
    /// False when any certificate field fails.
    pub ok: bool,
}

pub fn run_perturb(f: &PLMap, mode: &PerturbMode, config: &PipelineConfig) -> Result<PerturbOutput> {
    match mode {
        PerturbMode::Window { window, m } => {
            let g = window_perturb(f, &regular_window_shape(window.clone(), *m)?)?;
            Ok(simple_certificate("window", f, g))
        }
        PerturbMode::Snap { grid } => {
            let g = snap_determining_values(f, *grid)?;
            Ok(simple_certificate("snap", f, g))
        }
        PerturbMode::NowhereMonotone { n, epsilon } => {
            let pc = PerturbConfig { limits: config.limits(), ..PerturbConfig::default() };
            let out = nowhere_monotone_perturb(f, *n, epsilon, &pc)?;
            let failures = validate_certificate(f, &out.map, &out.certificate)?;
            Ok(PerturbOutput {
                certificate: write_certificate(&out.certificate),
                map: out.map,
                ok: failures.is_empty(),
            })
        }
    }
}

fn simple_certificate(kind: &str, f: &PLMap, g: PLMap) -> PerturbOutput {
    let preserving = check_measure_preserving(&g).preserving;
    let mut s = String::new();
    let _ = writeln!(s, "# plmap {kind} perturbation certificate v1");
    let _ = writeln!(s, "mode {kind}");
    let _ = writeln!(s, "distance {}", sup_distance(f, &g));
    let _ = writeln!(s, "min_abs_slope {}", g.min_abs_slope());
    let _ = writeln!(s, "measure_ok {preserving}");
    PerturbOutput { map: g, certificate: s, ok: preserving }
}

pub const ENTROPY_CSV_HEADER: &str = "i,n,h,cut_count,group_count";

/// Profile rows as CSV; a partition cut short by the budget gets a final
/// row `i,n,truncated,<cuts>,`.
pub fn entropy_csv(profile: &EntropyProfile) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{ENTROPY_CSV_HEADER}");
    let mut trunc = profile.truncated.iter().peekable();
    for (k, row) in profile.rows.iter().enumerate() {
        let _ = writeln!(s, "{},{},{},{},{}", row.i, row.n, row.h, row.cut_count, row.group_count);
        let last_of_i = profile.rows.get(k + 1).is_none_or(|next| next.i != row.i);
        if last_of_i {
            if let Some(t) = trunc.next_if(|t| t.i == row.i) {
                let _ = writeln!(s, "{},{},truncated,{},", t.i, t.n, t.cuts);
            }
        }
    }
    for t in trunc {
        let _ = writeln!(s, "{},{},truncated,{},", t.i, t.n, t.cuts);
    }
    s
}

#[derive(Debug, Clone)]
pub struct EntropyOutput {
    pub csv: String,
    pub profile: EntropyProfile,
    pub witness: Option<QBetaWitness>,
    pub report: Option<String>,
}

/// The `entropy` verb: profile for `i = 1..=i_max`, `n = 1..=n_max`, and the
/// `Q_β` search when `beta` is given.
pub fn run_entropy(
    f: &PLMap,
    i_max: u32,
    n_max: u32,
    beta: Option<(&Rat, u32)>,
    config: &PipelineConfig,
) -> Result<EntropyOutput> {
    let ec = config.entropy_config();
    let profile = entropy_profile(f, 1..=i_max, n_max, &ec, &ProfileOptions::default())?;
    let csv = entropy_csv(&profile);
    let (witness, report) = match beta {
        Some((b, k)) => {
            let w = q_beta_certificate(f, b, k, i_max, n_max, &ec)?;
            let text = match &w {
                Some(w) => format!("beta {b}\nk {k}\nwitness {} {}\nvalue {}\n", w.i, w.n, w.value),
                None => format!("beta {b}\nk {k}\nwitness none\n"),
            };
            (w, Some(text))
        }
        None => (None, None),
    };
    Ok(EntropyOutput { csv, profile, witness, report })
}

/// Rows of an entropy CSV: `(i, n, h)`; truncation rows are skipped.
pub fn parse_entropy_csv(text: &str) -> Result<Vec<(u32, u32, f64)>> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() || line.starts_with(ENTROPY_CSV_HEADER) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let bad = |col: usize, msg: &str| {
            Error::Format(FormatError::Syntax { line: line_no, column: col, message: msg.into() })
        };
        if fields.len() != 5 {
            return Err(bad(1, "expected 5 comma-separated fields"));
        }
        if fields[2] == "truncated" {
            continue;
        }
        let col = |k: usize| fields[..k].iter().map(|f| f.len() + 1).sum::<usize>() + 1;
        let i = fields[0].parse().map_err(|_| bad(col(0), "bad partition index"))?;
        let n = fields[1].parse().map_err(|_| bad(col(1), "bad word length"))?;
        let h = fields[2].parse().map_err(|_| bad(col(2), "bad entropy value"))?;
        rows.push((i, n, h));
    }
    Ok(rows)
}

/// The `analyze` verb: level sets at `levels`, the set `B₀`, and scale
/// diagnostics at `(x, r)` pairs.
pub fn analyze_report(f: &PLMap, levels: &[Rat], scales: &[(Rat, Rat)]) -> Result<String> {
    let mut s = String::new();
    for c in levels {
        let rep = level_set(f, c)?;
        let count = match rep.count {
            LevelCount::Finite(k) => k.to_string(),
            LevelCount::Infinite => "infinite".into(),
        };
        let pts: Vec<String> = rep.points.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(s, "level {c} count {count} points {}", pts.join(" "));
    }
    let b0 = b0_set(f);
    let parts: Vec<String> = b0.closure.intervals().iter().map(|i| format!("[{}, {}]", i.lo, i.hi)).collect();
    let _ = writeln!(s, "b0 closure {}", if parts.is_empty() { "empty".into() } else { parts.join(" ") });
    if !b0.excluded.is_empty() {
        let ex: Vec<String> = b0.excluded.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(s, "b0 excluded {}", ex.join(" "));
    }
    let _ = writeln!(s, "b0 measure {}", b0.measure());
    let _ = writeln!(s, "b0 contains_interval {}", b0.contains_interval());
    for (x, r) in scales {
        let d = scale_diagnostics(f, x, r)?;
        let _ = writeln!(s, "scale x {} r {} max_dq {} min_dq {}", d.x, d.r, d.max_dq, d.min_dq);
    }
    Ok(s)
}

/// Scale diagnostics at `x = k/grid`, `k = 0..=grid`, as CSV.
pub fn scale_csv(f: &PLMap, grid: u32, r: &Rat) -> Result<String> {
    let mut s = String::from("x,r,max_dq,min_dq\n");
    for k in 0..=grid {
        let d = scale_diagnostics(f, &Rat::new(k, grid), r)?;
        let _ = writeln!(s, "{},{},{},{}", d.x, d.r, d.max_dq, d.min_dq);
    }
    Ok(s)
}

/// Writes `map` in the map file format.
pub fn map_text(map: &PLMap) -> String {
    write_map(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::read_map;
    use crate::rat::r;

    #[test]
    fn build_examples() {
        assert_eq!(build_map("tent", 0).unwrap(), PLMap::tent());
        assert_eq!(build_map("zigzag m=5", 0).unwrap(), PLMap::zigzag(5));
        assert_eq!(build_map("zigzag 5", 0).unwrap(), PLMap::zigzag(5));
        assert_eq!(build_map("1-id", 0).unwrap(), PLMap::flip());
        let b = build_map("from-breakpoints \"0:1/3, 1/4:1, 2/3:1/3, 5/6:0, 1:1/3\"", 0).unwrap();
        assert_eq!(b, PLMap::skeleton());
        assert!(verify_report(&b).0);
        let rw = build_map("random-window tent 3", 11).unwrap();
        assert_eq!(rw, build_map("random-window tent 3", 11).unwrap());
        assert!(check_measure_preserving(&rw).preserving);
    }

    #[test]
    fn build_errors_have_columns() {
        let col = |spec: &str| match build_map(spec, 0) {
            Err(Error::Format(FormatError::Syntax { column, .. })) => column,
            Err(Error::Format(FormatError::Map { column, .. })) => column,
            other => panic!("{spec}: {other:?}"),
        };
        assert_eq!(col("zigzag m=0"), 8);
        assert_eq!(col("  banana"), 3);
        assert_eq!(col("from-breakpoints 0:0, 1/2:0.5, 1:1"), 27);
        // 1/2 does not exceed 1/2
        assert_eq!(col("from-breakpoints 0:0, 1/2:1, 1/2:0, 1:1"), 30);
        assert_eq!(col("from-breakpoints 0:0, 1/2:3/2, 1:1"), 27);
        assert_eq!(col("tent 3"), 6);
    }

    #[test]
    fn perturb_examples() {
        let cfg = PipelineConfig::default();
        let w = PerturbMode::Window { window: Interval::unit(), m: 3 };
        let out = run_perturb(&PLMap::identity(), &w, &cfg).unwrap();
        assert_eq!(out.map, PLMap::zigzag(3));
        assert!(out.ok);
        let out = run_perturb(&PLMap::skeleton(), &PerturbMode::Snap { grid: 3 }, &cfg).unwrap();
        assert_eq!(out.map, PLMap::skeleton());
        let nm = PerturbMode::NowhereMonotone { n: 2, epsilon: r(3, 10) };
        let out = run_perturb(&PLMap::tent(), &nm, &cfg).unwrap();
        assert!(out.ok);
        assert!(verify_report(&read_map(&map_text(&out.map)).unwrap()).0);
    }

    #[test]
    fn entropy_csv_and_witness() {
        let cfg = PipelineConfig::default();
        let out = run_entropy(&PLMap::identity(), 3, 10, Some((&r(1, 10), 1)), &cfg).unwrap();
        assert_eq!(out.witness.as_ref().map(|w| (w.i, w.n)), Some((1, 7)));
        let rows = parse_entropy_csv(&out.csv).unwrap();
        assert_eq!(rows.len(), 30);
        assert!((rows[0].2 - std::f64::consts::LN_2).abs() < 1e-15);
        let tight = PipelineConfig { cut_budget: 300, ..PipelineConfig::default() };
        let out = run_entropy(&PLMap::tent(), 2, 12, None, &tight).unwrap();
        assert!(out.csv.contains(",truncated,"));
        assert_eq!(parse_entropy_csv(&out.csv).unwrap().len(), out.profile.rows.len());
    }

    #[test]
    fn config_parsing() {
        let c = PipelineConfig::from_toml("seed = 5\ncut_budget = 1000\n").unwrap();
        assert_eq!((c.seed, c.cut_budget, c.lap_budget), (5, 1000, Limits::default().lap_budget));
        match PipelineConfig::from_toml("seed = 5\nbogus = 1\n") {
            Err(Error::Format(FormatError::Syntax { line: 2, .. })) => {}
            other => panic!("{other:?}"),
        }
        assert_eq!(c.output_path(Path::new("a.map")), PathBuf::from("./a.map"));
    }

    #[test]
    fn analyze_examples() {
        let s = analyze_report(&PLMap::tent(), &[r(1, 2)], &[(r(1, 2), r(1, 4))]).unwrap();
        assert!(s.contains("level 1/2 count 2 points 1/4 3/4"));
        assert!(s.contains("b0 excluded 1\n"));
        assert!(s.contains("max_dq 2 min_dq -2"));
        let csv = scale_csv(&PLMap::identity(), 4, &r(1, 8)).unwrap();
        assert_eq!(csv.lines().count(), 6);
    }
}
