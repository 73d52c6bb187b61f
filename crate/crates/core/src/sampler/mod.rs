//! Nested sampling for the evidence `Z = ∫ L(θ) π(θ) dθ`.
//!
//! The run keeps `n_live` points drawn from the prior. Each iteration
//! removes the lowest-likelihood point, credits it with the prior-mass
//! shell `X_{i−1} − X_i`, and replaces it with a draw from the prior
//! restricted to `L > L_worst`. Three constrained samplers are available:
//! plain rejection from the prior, one bounding ellipsoid, and a recursive
//! multi-ellipsoid decomposition.

mod constrained;
mod ellipsoid;
mod regions;
mod result;
mod shrinkage;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use constrained::{
    constrained_sample_basic, sample_in_ellipsoids, DrawBudget, LivePoint, PLATEAU_WARNING_TIES,
};
pub use ellipsoid::{bounding_ellipsoid, Ellipsoid};
pub use regions::{
    multi_decompose, single_region, two_means, RegionOptions, DEFAULT_SPLIT_THRESHOLD,
};
pub use result::{
    bayes_factor, posterior_summary, BayesFactor, EvidenceResult, PosteriorSummary, Sample,
    Termination,
};
pub use shrinkage::{
    accumulate, sample_log_shrinkage, should_terminate, shrink_log_mass, Shrinkage, ShrinkageMode,
};

use crate::error::{Error, Result};
use crate::math::{log_add_exp, log_sub_exp};

/// What the sampler integrates: a prior transform from the unit cube and a
/// log-likelihood. Must be referentially transparent.
pub trait Problem: Sync {
    fn dim(&self) -> usize;

    /// Maps `unit ∈ [0,1]^d` to parameter space.
    fn transform(&self, unit: &[f64], theta: &mut [f64]);

    fn log_likelihood(&self, theta: &[f64]) -> f64;
}

impl<P: Problem + ?Sized> Problem for &P {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn transform(&self, unit: &[f64], theta: &mut [f64]) {
        (**self).transform(unit, theta)
    }
    fn log_likelihood(&self, theta: &[f64]) -> f64 {
        (**self).log_likelihood(theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Basic,
    Single,
    #[default]
    Multi,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Basic, Method::Single, Method::Multi];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Basic => "basic",
            Method::Single => "single",
            Method::Multi => "multi",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "basic" => Ok(Method::Basic),
            "single" => Ok(Method::Single),
            "multi" => Ok(Method::Multi),
            other => Err(Error::Domain(format!(
                "unknown method `{other}` (basic, single, multi)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    pub n_live: usize,
    /// Stop once the remaining mass could add less than this to `ln Z`.
    pub tol: f64,
    pub method: Method,
    /// Multiplier on each ellipsoid's squared-radius threshold.
    pub enlargement: f64,
    pub split_threshold: f64,
    pub seed: u64,
    pub max_iterations: u64,
    /// Proposals allowed per replacement before giving up.
    pub max_attempts: u64,
    pub shrinkage: ShrinkageMode,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            n_live: 50,
            tol: 0.5,
            method: Method::Multi,
            enlargement: 1.25,
            split_threshold: DEFAULT_SPLIT_THRESHOLD,
            seed: 0,
            max_iterations: 1_000_000,
            max_attempts: 1_000_000,
            shrinkage: ShrinkageMode::Deterministic,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_live < 2 {
            return Err(Error::Domain(format!(
                "n_live must be at least 2, got {}",
                self.n_live
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Domain(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if !(self.enlargement >= 1.0) {
            return Err(Error::Domain(format!(
                "enlargement must be >= 1, got {}",
                self.enlargement
            )));
        }
        if !(self.split_threshold > 0.0 && self.split_threshold <= 1.0) {
            return Err(Error::Domain(format!(
                "split threshold must lie in (0, 1], got {}",
                self.split_threshold
            )));
        }
        if self.max_iterations == 0 || self.max_attempts == 0 {
            return Err(Error::Domain(
                "iteration and attempt limits must be positive".into(),
            ));
        }
        Ok(())
    }
}

struct Dead {
    theta: Vec<f64>,
    log_l: f64,
    log_mass: f64,
}

/// Runs nested sampling on `problem`.
pub fn run<P: Problem + ?Sized>(problem: &P, config: &SamplerConfig) -> Result<EvidenceResult> {
    config.validate()?;
    let d = problem.dim();
    if d == 0 {
        return Err(Error::Specification("problem has no parameters".into()));
    }
    let n = config.n_live;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut budget = DrawBudget::new(config.max_attempts);

    let mut live: Vec<LivePoint> = (0..n)
        .map(|_| {
            let unit = (0..d).map(|_| rng.random::<f64>()).collect();
            LivePoint::evaluate(problem, unit)
        })
        .collect();
    budget.calls += n as u64;
    if live.iter().all(|p| p.log_l == f64::NEG_INFINITY) {
        return Err(Error::Initialization(n));
    }

    let mut shrink = Shrinkage::new(config.shrinkage, n);
    let mut log_z = f64::NEG_INFINITY;
    let mut log_x_prev = 0.0;
    let mut dead: Vec<Dead> = Vec::new();
    let mut log_volumes: Vec<f64> = Vec::new();
    // index of a dead point still sitting in `live` (set when replacement fails)
    let mut stale: Option<usize> = None;

    let termination = loop {
        let (log_l_min, log_l_max) = live
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.log_l), hi.max(p.log_l))
            });
        if !dead.is_empty() && should_terminate(log_z, log_l_max, log_x_prev, config.tol) {
            break Termination::Tolerance;
        }
        // every live point on one contour: the rest of the mass is flat
        if log_l_min == log_l_max {
            break Termination::Plateau;
        }
        if dead.len() as u64 >= config.max_iterations {
            break Termination::MaxIterations;
        }

        let worst =
            live.iter().enumerate().fold(
                0,
                |best, (i, p)| if p.log_l < live[best].log_l { i } else { best },
            );
        let threshold = live[worst].log_l;
        let log_x = shrink.advance(&mut rng);
        let log_mass = log_sub_exp(log_x_prev, log_x);
        log_z = log_add_exp(log_z, threshold + log_mass);
        dead.push(Dead {
            theta: live[worst].theta.clone(),
            log_l: threshold,
            log_mass,
        });
        log_volumes.push(log_x);
        log_x_prev = log_x;

        let replacement = match config.method {
            Method::Basic => constrained_sample_basic(threshold, problem, &mut rng, &mut budget),
            Method::Single | Method::Multi => {
                let units: Vec<Vec<f64>> = live.iter().map(|p| p.unit.clone()).collect();
                let opts = RegionOptions {
                    enlargement: config.enlargement,
                    split_threshold: config.split_threshold,
                    log_point_volume: Some(log_x - (n as f64).ln()),
                };
                let regions = if config.method == Method::Single {
                    single_region(&units, &opts).map(|e| vec![e])
                } else {
                    multi_decompose(&units, &opts, &mut rng)
                };
                regions.and_then(|ells| {
                    sample_in_ellipsoids(&ells, threshold, problem, &mut rng, &mut budget)
                })
            }
        };
        match replacement {
            Ok(p) => live[worst] = p,
            Err(Error::NonConvergence {
                attempts,
                threshold,
            }) => {
                log::warn!("gave up after {attempts} proposals above log-likelihood {threshold}");
                stale = Some(worst);
                break Termination::RejectionBudget;
            }
            Err(e) => return Err(e),
        }

        if dead.len().is_multiple_of(100) {
            log::info!(
                target: "fuzzy_evidence::progress",
                "iter {:>6}  logZ {:>12.4}  remaining ≤ {:>12.4}  calls {}",
                dead.len(),
                log_z,
                log_l_max + log_x,
                budget.calls
            );
        }
    };

    let n_final = n - usize::from(stale.is_some());
    let log_final_mass = log_x_prev - (n_final as f64).ln();
    let finals: Vec<&LivePoint> = live
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != stale)
        .map(|(_, p)| p)
        .collect();
    for p in &finals {
        log_z = log_add_exp(log_z, p.log_l + log_final_mass);
    }

    let n_iter = dead.len() as u64;
    let entries = dead
        .into_iter()
        .map(|d| (d.theta, d.log_l, d.log_mass))
        .chain(
            finals
                .into_iter()
                .map(|p| (p.theta.clone(), p.log_l, log_final_mass)),
        );
    let mut samples = Vec::new();
    let mut information = 0.0;
    for (theta, log_l, log_mass) in entries {
        let log_weight = log_l + log_mass - log_z;
        if log_weight == f64::NEG_INFINITY {
            continue;
        }
        information += log_weight.exp() * (log_l - log_z);
        samples.push(Sample {
            theta,
            log_l,
            log_weight,
        });
    }
    let information = information.max(0.0);

    Ok(EvidenceResult {
        model: String::new(),
        prior: String::new(),
        sigma: String::new(),
        param_names: Vec::new(),
        config: config.clone(),
        log_z,
        log_z_err: (information / n as f64).sqrt(),
        information,
        n_calls: budget.calls,
        n_iter,
        termination,
        plateau_warning: budget.plateau_warning,
        log_volumes,
        samples,
    })
}
