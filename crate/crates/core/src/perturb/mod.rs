//! Perturbations of measure-preserving maps.

pub mod certificate;
pub mod monotone;
pub mod nowhere;
pub mod snap;
pub mod window;

pub use certificate::{read_certificate, write_certificate, PerturbCertificate};
pub use monotone::{decide_a_n, inf_difference_quotient, not_in_a_n_check, verify_a_n_witness, AnDecision};
pub use nowhere::{
    nowhere_monotone_perturb, reflect_on_interval, reflect_on_intervals, validate_certificate, NowhereMonotone,
    PerturbConfig,
};
pub use snap::{grid_excursion, separating_grid, snap_determining_values};
pub use window::{
    random_window_perturbation, regular_window_shape, window_perturb, window_perturb_many, EndpointRule, WindowMap,
};
