//! Moves every determining value onto a rational grid by post-composing
//! with grid excursions.

use lebesgue_pl::measure::is_measure_preserving;
use lebesgue_pl::perturb::{regular_window_shape, separating_grid, snap_determining_values, window_perturb};
use lebesgue_pl::plmap::{determining_values, sup_distance};
use lebesgue_pl::{Interval, PLMap, Rat};

fn show(values: &[Rat]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

fn main() -> lebesgue_pl::Result<()> {
    let skeleton = PLMap::skeleton();
    println!("skeleton determining values: {}", show(&determining_values(&skeleton)));
    assert_eq!(snap_determining_values(&skeleton, 3)?, skeleton);
    println!("already on the 1/3 grid");

    let window = Interval::new(Rat::new(1, 5), Rat::new(3, 5));
    let f = window_perturb(&PLMap::tent(), &regular_window_shape(window, 3)?)?;
    println!("f preserving: {}, determining values {}", is_measure_preserving(&f), show(&determining_values(&f)));
    let n = separating_grid(&f, 2);
    let g = snap_determining_values(&f, n)?;
    println!(
        "snapped to the 1/{n} grid: {} ({} segments, preserving {}, distance {})",
        show(&determining_values(&g)),
        g.segment_count(),
        is_measure_preserving(&g),
        sup_distance(&f, &g)
    );
    Ok(())
}
