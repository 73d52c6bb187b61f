//! Datasets, GLM term lists, model specs and the Gaussian likelihood.

mod dataset;
mod glm;
mod prior;
mod spec;
pub mod spec_file;

pub use dataset::Dataset;
pub use glm::{glm_mean, GlmTerms};
pub use prior::{prior_transform, PriorBox};
pub use spec::{
    gaussian_log_likelihood, log_likelihood, predict, BoundModel, ModelKind, ModelSpec, SigmaMode,
    DEFAULT_GLM_RANGE, DEFAULT_SIGMA_RANGE,
};
pub use spec_file::{parse_model_spec, SpecDocument};
