//! Dependence coefficients, transfer operators and orthomartingale
//! decompositions for stationary random fields, with Monte Carlo checks of
//! their central limit behaviour.

pub mod cli;
pub mod coupling;
pub mod error;
pub mod field;
pub mod limits;
pub mod ortho;
pub mod quad;
pub mod quantile;
pub mod rng;
pub mod stats;
pub mod sums;
pub mod transfer;

pub use error::{Error, Result};
