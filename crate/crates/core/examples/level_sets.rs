//! Level sets, the set of values with several preimages, difference
//! quotients at a finite scale, and stability of preimages.

use lebesgue_pl::analyze::{b0_set, level_set, scale_diagnostics};
use lebesgue_pl::measure::preimage_stability;
use lebesgue_pl::{Interval, PLMap, Rat};

fn main() -> lebesgue_pl::Result<()> {
    let skeleton = PLMap::skeleton();
    for c in [Rat::zero(), Rat::new(1, 3), Rat::new(1, 2), Rat::one()] {
        let rep = level_set(&skeleton, &c)?;
        let pts: Vec<String> = rep.points.iter().map(|p| p.to_string()).collect();
        println!("B⁻¹({c}) = {{{}}}", pts.join(", "));
    }
    for (name, f) in [("id", PLMap::identity()), ("tent", PLMap::tent()), ("skeleton", skeleton.clone())] {
        let b0 = b0_set(&f);
        println!("{name}: λ(B₀) = {}, contains an interval: {}", b0.measure(), b0.contains_interval());
    }
    for r in [Rat::new(1, 4), Rat::new(1, 64)] {
        let d = scale_diagnostics(&skeleton, &Rat::new(1, 4), &r)?;
        println!("skeleton at 1/4, r = {r}: quotients in [{}, {}]", d.min_dq, d.max_dq);
    }
    let j = Interval::new(Rat::zero(), Rat::new(1, 3));
    let d = preimage_stability(&PLMap::identity(), &PLMap::zigzag(3), &j);
    println!("λ(id⁻¹J Δ Z_3⁻¹J) for J = [0,1/3]: {d}");
    Ok(())
}
