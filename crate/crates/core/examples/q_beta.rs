//! Searches for a finite witness that a map has small partition entropy,
//! and checks the elementary bound on −Σ a ln a used alongside it.

use lebesgue_pl::entropy::{entropy_sum_bound, q_beta_certificate, EntropyConfig};
use lebesgue_pl::{PLMap, Rat};

fn main() -> lebesgue_pl::Result<()> {
    let config = EntropyConfig::default();
    let beta = Rat::new(1, 10);
    match q_beta_certificate(&PLMap::identity(), &beta, 1, 3, 10, &config)? {
        Some(w) => println!("id: h_{}(P_{}) = {} < {beta}", w.n, w.i, w.value),
        None => println!("id: no witness within budget"),
    }
    match q_beta_certificate(&PLMap::tent(), &beta, 1, 2, 6, &config)? {
        Some(w) => println!("tent: witness ({}, {})", w.i, w.n),
        None => println!("tent: no witness within budget"),
    }

    let uniform = vec![Rat::new(1, 8); 5];
    let skewed = vec![Rat::new(1, 2), Rat::new(1, 10), Rat::new(1, 100)];
    for a in [uniform, skewed] {
        let b = entropy_sum_bound(&a, 30)?;
        println!("lhs {} rhs {} holds {} equality {}", b.lhs, b.rhs, b.holds, b.equality);
    }
    Ok(())
}
