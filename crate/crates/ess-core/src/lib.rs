//! Effective support size estimation in the dual-access query model.
//!
//! The ε-effective support size of a discrete distribution is the smallest
//! support size of any distribution within total variation distance ε of it,
//! equivalently the number of heaviest elements whose complement carries at
//! most ε of the mass. This crate provides
//!
//! * [`distribution`]: exact, full-knowledge distributions with the canonical
//!   order and the ground-truth quantities used to check estimates,
//! * [`oracle`]: sample/evaluate access with seeded randomness and query
//!   counters,
//! * [`estimator`]: the two-stage estimator, which only ever sees the
//!   distribution through a probability-revealing oracle,
//! * [`generators`]: synthetic fixture families.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod alias;
pub mod distribution;
mod error;
pub mod estimator;
pub mod generators;
pub mod oracle;
mod sum;

pub use distribution::{DiscreteDistribution, Element, Label, LEVEL_SLACK, MASS_TOLERANCE};
pub use error::{Error, Result};
pub use estimator::{
    estimate_ess, estimate_ess_unicriterion, EstimateResult, EstimatorParams, Pivot, SampleSizes,
};
pub use generators::{make_distribution, Family, GeneratorSpec};
pub use oracle::{derive_seed, DualOracle, ProbabilityRevealing, QueryCounts};
