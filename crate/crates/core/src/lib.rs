//! Exact-arithmetic toolkit for continuous piecewise-linear maps of [0,1]
//! that preserve Lebesgue measure.
//!
//! Every coordinate is an exact [`Rat`]. The crate builds maps, checks
//! measure preservation through the reciprocal-slope fibre criterion,
//! perturbs maps (window perturbations, grid snapping of determining values,
//! a certified nowhere-monotone construction), decides membership in the
//! one-sided-monotonicity classes `A_n`, and computes partition entropies of
//! joins `∨ f⁻ⁱP` from exact cell measures.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod analyze;
pub mod entropy;
pub mod error;
pub mod interval_set;
pub mod io;
pub mod measure;
pub mod perturb;
pub mod pipeline;
pub mod plmap;
pub mod rat;
pub mod svg;

pub use error::{Error, Result};
pub use interval_set::{Interval, IntervalSet};
pub use plmap::PLMap;
pub use rat::Rat;

/// Resource guards for the operations whose output grows exponentially.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of affine pieces produced by a composition.
    pub lap_budget: usize,
    /// Maximum number of cut points in a join partition.
    pub cut_budget: usize,
    /// Maximum number of cells examined by the `A_n` decision.
    pub cell_budget: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { lap_budget: 1_000_000, cut_budget: 10_000_000, cell_budget: 10_000_000 }
    }
}
