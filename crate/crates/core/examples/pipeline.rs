//! The file-producing pipeline behind the `plmap` binary: build, perturb,
//! entropy CSV and SVG plots, written to a temporary directory.

use lebesgue_pl::perturb::read_certificate;
use lebesgue_pl::pipeline::{build_map, map_text, run_entropy, run_perturb, write_text, PerturbMode, PipelineConfig};
use lebesgue_pl::svg::{entropy_svg, map_svg};
use lebesgue_pl::Rat;

fn main() -> lebesgue_pl::Result<()> {
    let dir = std::env::temp_dir().join("plmap-example");
    let config = PipelineConfig { output_dir: dir.clone(), ..PipelineConfig::default() };
    let tent = build_map("tent", config.seed)?;
    let mode = PerturbMode::NowhereMonotone { n: 1, epsilon: Rat::new(1, 2) };
    let out = run_perturb(&tent, &mode, &config)?;
    let cert = read_certificate(&out.certificate)?;
    write_text(&dir.join("F.map"), &map_text(&out.map))?;
    write_text(&dir.join("F.cert"), &out.certificate)?;
    write_text(&dir.join("F.svg"), &map_svg(&out.map, Some(&cert)))?;

    let e = run_entropy(&tent, 3, 8, None, &config)?;
    write_text(&dir.join("tent-entropy.csv"), &e.csv)?;
    let rows: Vec<_> = e.profile.rows.iter().map(|r| (r.i, r.n, r.h.to_f64())).collect();
    write_text(&dir.join("tent-entropy.svg"), &entropy_svg(&rows))?;
    println!("wrote F.map, F.cert, F.svg, tent-entropy.csv, tent-entropy.svg to {}", dir.display());
    Ok(())
}
