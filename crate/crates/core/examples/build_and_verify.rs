//! Builds the standard maps, checks measure preservation band by band, and
//! round-trips one through the map file format.

use lebesgue_pl::io::{read_map, write_map};
use lebesgue_pl::measure::{band_weights, check_measure_preserving, preimage_measure_check};
use lebesgue_pl::{Interval, PLMap, Rat};

fn main() -> lebesgue_pl::Result<()> {
    let maps = [
        ("id", PLMap::identity()),
        ("1-id", PLMap::flip()),
        ("tent", PLMap::tent()),
        ("Z_5", PLMap::zigzag(5)),
        ("skeleton", PLMap::skeleton()),
    ];
    for (name, f) in &maps {
        println!("{name}: {} segments, preserving = {}", f.segment_count(), check_measure_preserving(f).preserving);
    }

    let skeleton = &maps[4].1;
    for b in band_weights(skeleton) {
        println!("  band ({}, {}) weight {}", b.band.lo, b.band.hi, b.weight_sum);
    }
    let j = Interval::new(Rat::new(1, 3), Rat::one());
    let check = preimage_measure_check(skeleton, &j);
    println!("  λ(B⁻¹[1/3,1]) = {} vs λ([1/3,1]) = {}", check.lhs, check.rhs);

    let text = write_map(skeleton);
    assert_eq!(&read_map(&text)?, skeleton);
    print!("{text}");

    // Increasing but not the identity: too much mass lands below 1/2.
    let bad = PLMap::from_points(vec![
        (Rat::zero(), Rat::zero()),
        (Rat::new(3, 4), Rat::new(1, 2)),
        (Rat::one(), Rat::one()),
    ])?;
    let verdict = check_measure_preserving(&bad);
    let w = verdict.witness.expect("not preserving");
    println!("bent identity fails on ({}, {}) with weight {}", w.band.lo, w.band.hi, w.weight_sum);
    Ok(())
}
