use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use lebesgue_pl::entropy::parse_decimal;
use lebesgue_pl::error::{Error, FormatError, ParseRatError};
use lebesgue_pl::perturb::read_certificate;
use lebesgue_pl::pipeline::{self as pl, PerturbMode, PipelineConfig};
use lebesgue_pl::svg::{entropy_svg, map_svg};
use lebesgue_pl::{Interval, Rat};

#[derive(Parser)]
#[command(name = "plmap", version, about = "Exact piecewise-linear measure-preserving maps of [0,1]")]
struct Cli {
    /// TOML pipeline configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Window,
    Snap,
    NowhereMonotone,
}

#[derive(Subcommand)]
enum Command {
    /// Build a map from a construction spec and write it in map file format.
    Build {
        /// e.g. `tent`, `zigzag m=5`, `from-breakpoints "0:1/3, 1/4:1, ..."`
        #[arg(required = true, num_args = 1..)]
        spec: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check measure preservation.
    Verify { map: String },
    /// Perturb a map; writes the map and a certificate.
    Perturb {
        map: String,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Window `a,b` for window mode.
        #[arg(long)]
        window: Option<String>,
        /// Lap count for window mode.
        #[arg(long)]
        m: Option<u32>,
        /// Grid denominator for snap mode.
        #[arg(long)]
        grid: Option<u64>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        eps: Option<String>,
        #[arg(short, long, default_value = "perturbed.map")]
        output: PathBuf,
        /// Defaults to the output path with extension `cert`.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Entropy profile over dyadic partitions as CSV.
    Entropy {
        map: String,
        i_max: u32,
        n_max: u32,
        /// Threshold for the Q_β witness search; a decimal such as 0.1 is read exactly.
        #[arg(long)]
        beta: Option<String>,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Level sets, the set B₀ and difference-quotient diagnostics.
    Analyze {
        map: String,
        #[arg(long = "level")]
        levels: Vec<String>,
        /// `x,r` pairs.
        #[arg(long = "scale")]
        scales: Vec<String>,
        /// Writes diagnostics at x = k/N for k = 0..=N to this CSV.
        #[arg(long, requires_all = ["grid", "r"])]
        csv: Option<PathBuf>,
        #[arg(long)]
        grid: Option<u32>,
        #[arg(long)]
        r: Option<String>,
    },
    /// Render a map (optionally with its certificate) or an entropy CSV as SVG.
    Plot {
        input: String,
        #[arg(long)]
        certificate: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Verification(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn usage(message: String) -> Failure {
    Failure::Lib(Error::Format(FormatError::Syntax { line: 1, column: 1, message }))
}

fn rat_arg(s: &str) -> Result<Rat, Failure> {
    s.trim().parse::<Rat>().map_err(|e: ParseRatError| Failure::Lib(e.into()))
}

fn pair_arg(s: &str) -> Result<(Rat, Rat), Failure> {
    let (a, b) = s.split_once(',').ok_or_else(|| usage(format!("expected `a,b`, found `{s}`")))?;
    Ok((rat_arg(a)?, rat_arg(b)?))
}

fn emit(config: &PipelineConfig, output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => Ok(pl::write_text(&config.output_path(p), text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut config = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    }
    .with_env();
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    match cli.command {
        Command::Build { spec, output } => {
            let f = pl::build_map(&spec.join(" "), config.seed)?;
            emit(&config, output.as_deref(), &pl::map_text(&f))?;
            let (ok, report) = pl::verify_report(&f);
            if !ok {
                return Err(Failure::Verification(format!("warning: map is not measure-preserving\n{report}")));
            }
        }
        Command::Verify { map } => {
            let (ok, report) = pl::verify_report(&pl::load_map(&map, config.seed)?);
            print!("{report}");
            if !ok {
                return Err(Failure::Verification("not measure-preserving".into()));
            }
        }
        Command::Perturb { map, mode, window, m, grid, n, eps, output, certificate } => {
            let f = pl::load_map(&map, config.seed)?;
            let missing = |flag: &str| usage(format!("--{flag} is required for this mode"));
            let mode = match mode {
                Mode::Window => {
                    let (a, b) = pair_arg(&window.ok_or_else(|| missing("window"))?)?;
                    PerturbMode::Window { window: Interval::new(a, b), m: m.ok_or_else(|| missing("m"))? }
                }
                Mode::Snap => PerturbMode::Snap { grid: grid.ok_or_else(|| missing("grid"))? },
                Mode::NowhereMonotone => PerturbMode::NowhereMonotone {
                    n: n.ok_or_else(|| missing("n"))?,
                    epsilon: rat_arg(&eps.ok_or_else(|| missing("eps"))?)?,
                },
            };
            let out = pl::run_perturb(&f, &mode, &config)?;
            let cert_path = certificate.unwrap_or_else(|| output.with_extension("cert"));
            pl::write_text(&config.output_path(&output), &pl::map_text(&out.map))?;
            pl::write_text(&config.output_path(&cert_path), &out.certificate)?;
            if !out.ok {
                return Err(Failure::Verification("certificate check failed".into()));
            }
        }
        Command::Entropy { map, i_max, n_max, beta, k, output } => {
            let f = pl::load_map(&map, config.seed)?;
            let beta = match beta {
                Some(b) => Some(parse_decimal(&b).ok_or_else(|| usage(format!("bad value for --beta: `{b}`")))?),
                None => None,
            };
            let out = pl::run_entropy(&f, i_max, n_max, beta.as_ref().map(|b| (b, k)), &config)?;
            emit(&config, output.as_deref(), &out.csv)?;
            if let Some(report) = &out.report {
                let report =
                    if out.witness.is_none() { format!("{report}no witness within budget\n") } else { report.clone() };
                if output.is_some() {
                    print!("{report}");
                } else {
                    eprint!("{report}");
                }
            }
            if let Some(t) = out.profile.truncated.first() {
                return Err(Failure::Lib(Error::Budget { what: "cut", reached: t.cuts, limit: config.cut_budget }));
            }
        }
        Command::Analyze { map, levels, scales, csv, grid, r } => {
            let f = pl::load_map(&map, config.seed)?;
            let levels = levels.iter().map(|c| rat_arg(c)).collect::<Result<Vec<_>, _>>()?;
            let scales = scales.iter().map(|s| pair_arg(s)).collect::<Result<Vec<_>, _>>()?;
            print!("{}", pl::analyze_report(&f, &levels, &scales)?);
            if let (Some(path), Some(grid), Some(r)) = (csv, grid, r) {
                pl::write_text(&config.output_path(&path), &pl::scale_csv(&f, grid, &rat_arg(&r)?)?)?;
            }
        }
        Command::Plot { input, certificate, output } => {
            let path = Path::new(&input);
            let text = if path.is_file() { Some(pl::read_text(path)?) } else { None };
            let svg = match text {
                Some(t) if t.starts_with(pl::ENTROPY_CSV_HEADER) => entropy_svg(&pl::parse_entropy_csv(&t)?),
                _ => {
                    let f = pl::load_map(&input, config.seed)?;
                    let cert = match certificate {
                        Some(p) => Some(read_certificate(&pl::read_text(&p)?).map_err(Error::from)?),
                        None => None,
                    };
                    map_svg(&f, cert.as_ref())
                }
            };
            emit(&config, output.as_deref(), &svg)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Format(_) | Error::Rat(_) => 2,
                Error::Budget { .. } => 3,
                _ => 1,
            })
        }
    }
}
