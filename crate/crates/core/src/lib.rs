//! Low-crossing matchings, low-discrepancy colorings and ε-approximations of
//! finite set systems, computed by sampled multiplicative-weights updates
//! that only touch ranges through a membership oracle.
//!
//! The main entry points are [`build_matching`], [`low_disc_color`] and
//! [`approximate`], their presampled counterparts in [`presample`], and the
//! geometric range families in [`geometry`].

pub mod approx;
pub mod bench;
pub mod bits;
pub mod discrepancy;
pub mod error;
pub mod geometry;
pub mod matching;
pub mod params;
pub mod presample;
pub mod sampling;
pub mod stats;
pub mod system;
pub mod testkit;
pub mod weighted;

pub use approx::{approximate, eps_error, larger_color_class, vc_bootstrap_approximate, ApproxResult};
pub use discrepancy::{
    color_from_matching, discrepancy, low_disc_color, random_coloring, Coloring,
};
pub use error::{Error, Result};
pub use matching::{build_matching, crossing_number, partial_matching, Matching, MwuConfig};
pub use params::{params_from_dual_shatter, AssumptionParams};
pub use system::{Edge, ExplicitSystem, Oracle, OracleCalls, Restricted, SetSystem};
pub use weighted::WeightedIndex;
