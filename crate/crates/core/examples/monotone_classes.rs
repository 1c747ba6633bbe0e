//! Decides membership in A_n: is there a point where every difference
//! quotient is at least −n?

use lebesgue_pl::perturb::{
    decide_a_n, inf_difference_quotient, nowhere_monotone_perturb, verify_a_n_witness, PerturbConfig,
};
use lebesgue_pl::{Limits, PLMap, Rat};

fn main() -> lebesgue_pl::Result<()> {
    let limits = Limits::default();
    let steep = nowhere_monotone_perturb(&PLMap::tent(), 2, &Rat::new(3, 10), &PerturbConfig::default())?.map;
    let maps = [
        ("F", steep),
        ("id", PLMap::identity()),
        ("1-id", PLMap::flip()),
        ("tent", PLMap::tent()),
        ("Z_6", PLMap::zigzag(6)),
        ("skeleton", PLMap::skeleton()),
    ];
    for (name, f) in &maps {
        for n in [1, 2, 4, 8] {
            let d = decide_a_n(f, n, &limits)?;
            match &d.witness {
                Some(x) => {
                    assert!(verify_a_n_witness(f, n, x)?);
                    println!("{name:>8} ∈ A_{n}: witness x = {x} ({} cells)", d.cells);
                }
                None => println!("{name:>8} ∉ A_{n} ({} cells)", d.cells),
            }
        }
    }
    let tent = PLMap::tent();
    let q = inf_difference_quotient(&tent, &Rat::new(1, 2), &Rat::one())?;
    println!("tent: inf quotient at 1/2 over radius 1 is {q}");
    Ok(())
}
