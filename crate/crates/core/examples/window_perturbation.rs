//! Replaces a map on a window by a zigzag and by random lap shapes; the
//! result stays measure-preserving and within the window's height of `f`.

use lebesgue_pl::measure::is_measure_preserving;
use lebesgue_pl::perturb::{random_window_perturbation, regular_window_shape, window_perturb};
use lebesgue_pl::plmap::sup_distance;
use lebesgue_pl::{Interval, PLMap, Rat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lebesgue_pl::Result<()> {
    let id = PLMap::identity();
    let z3 = window_perturb(&id, &regular_window_shape(Interval::unit(), 3)?)?;
    assert_eq!(z3, PLMap::zigzag(3));
    println!("id with a 3-lap window on [0,1]: Z_3, sup distance {}", sup_distance(&id, &z3));

    let tent = PLMap::tent();
    let w = regular_window_shape(Interval::new(Rat::new(1, 8), Rat::new(3, 8)), 5)?;
    let g = window_perturb(&tent, &w)?;
    println!(
        "tent with 5 laps on [1/8,3/8]: {} segments, preserving {}, distance {}",
        g.segment_count(),
        is_measure_preserving(&g),
        sup_distance(&tent, &g)
    );

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut f = PLMap::skeleton();
    for step in 1..=5 {
        let (next, w) = random_window_perturbation(&f, &mut rng, &Rat::new(1, 10), 5, 6)?;
        println!(
            "step {step}: window [{}, {}], {} segments, preserving {}",
            w.window().lo,
            w.window().hi,
            next.segment_count(),
            is_measure_preserving(&next)
        );
        f = next;
    }
    Ok(())
}
