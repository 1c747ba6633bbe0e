//! Entropy of joins of dyadic partitions under the map, to 50 digits.

use lebesgue_pl::entropy::{
    dyadic_partition, entropy_H, entropy_profile, join_partition, EntropyConfig, ProfileOptions,
};
use lebesgue_pl::{Limits, PLMap};

fn main() -> lebesgue_pl::Result<()> {
    let config = EntropyConfig::default();
    let tent = PLMap::tent();
    let p2 = dyadic_partition(2)?;
    let joined = join_partition(&tent, &p2, 3, &Limits::default())?;
    println!("tent, P_2 joined 3 times: {} cells, {} labels", joined.cells.len(), joined.groups.len());
    println!("H = {}", entropy_H(&joined, config.digits));

    for (name, f) in [("id", PLMap::identity()), ("tent", tent), ("Z_4", PLMap::zigzag(4))] {
        let profile = entropy_profile(&f, 1..=3, 6, &config, &ProfileOptions::default())?;
        println!("\n{name}");
        for row in &profile.rows {
            println!("  i={} n={} h={} ({} cuts)", row.i, row.n, row.h, row.cut_count);
        }
        println!("  increases in n: {}", profile.monotonicity_violations().len());
    }
    Ok(())
}
