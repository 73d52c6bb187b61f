//! Bayesian model comparison for fuzzy rule-base models and polynomial GLMs.
//!
//! Each candidate model is scored by its marginal likelihood (evidence),
//! computed with nested sampling. The crate is split into four layers:
//!
//! * [`fuzzy`]: triangular memberships, rule bases, Mamdani inference.
//! * [`model`]: datasets, GLM term lists, model specs and the Gaussian
//!   likelihood the sampler consumes.
//! * [`sampler`]: the nested sampler with rejection, single-ellipsoid and
//!   multi-ellipsoid constrained draws.
//! * [`experiments`]: synthetic data, the bundled model roster, comparison
//!   runs and report emission.

pub mod error;
pub mod experiments;
pub mod fuzzy;
pub mod math;
pub mod model;
pub mod sampler;

pub use error::{Error, Result};
