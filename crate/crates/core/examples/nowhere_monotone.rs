//! Builds a certified perturbation that leaves the class A_n, then checks
//! the certificate independently.

use lebesgue_pl::perturb::{nowhere_monotone_perturb, validate_certificate, write_certificate, PerturbConfig};
use lebesgue_pl::{PLMap, Rat};

fn main() -> lebesgue_pl::Result<()> {
    let config = PerturbConfig::default();
    for (name, f) in [("id", PLMap::identity()), ("tent", PLMap::tent()), ("skeleton", PLMap::skeleton())] {
        for n in [1, 2, 4] {
            let eps = Rat::new(3, 10);
            let out = nowhere_monotone_perturb(&f, n, &eps, &config)?;
            let cert = &out.certificate;
            let failures = validate_certificate(&f, &out.map, cert)?;
            println!(
                "{name:>8} n={n}: {:>6} segments, min |slope| {} > {}, distance {} <= {eps}, valid {}",
                out.map.segment_count(),
                cert.min_abs_slope,
                10 * n,
                cert.distance,
                failures.is_empty()
            );
        }
    }
    let out = nowhere_monotone_perturb(&PLMap::tent(), 1, &Rat::new(1, 2), &config)?;
    print!("\n{}", write_certificate(&out.certificate));
    Ok(())
}
