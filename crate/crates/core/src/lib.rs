//! Certified enclosures of `atan` from the Shafer bound family
//! `(1+a) x / (a + sqrt(1+x^2))`, the monotonicity analysis of
//! `f_a(x) = (a + sqrt(1+x^2)) atan(x) / x` that proves them, a
//! high-precision reference used to verify every bound, and a fast
//! approximation kernel whose error is certified by the enclosure width.

pub mod catalog;
pub mod error;
pub mod family;
pub mod kernel;
pub mod oracle;

pub use catalog::{
    best_enclosure, classify_regime, enclosure, eval_bound, BoundId, Enclosure, Regime, ShaferParam, Side,
};
pub use error::{BoundsError, Result};
pub use family::{find_minimum, MinimumResult, SolverConfig};
pub use kernel::{approx, error_profile, tune_crossover, CertifiedValue, ErrorProfile, KernelSpec};
pub use oracle::{
    dominance_report, oracle_arctan, DominanceConfig, DominanceReport, GridSpec, HighPrecision, Oracle,
    OracleTable, Precision, Spacing, SweepReport,
};
