use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SamplerConfig;
use crate::error::{Error, Result};

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// The remaining-mass bound fell below `tol`.
    Tolerance,
    /// All live points share one likelihood value.
    Plateau,
    MaxIterations,
    /// No point above the contour was found within the attempt budget.
    RejectionBudget,
}

impl Termination {
    pub fn converged(&self) -> bool {
        matches!(self, Termination::Tolerance | Termination::Plateau)
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Tolerance => "tolerance",
            Termination::Plateau => "plateau",
            Termination::MaxIterations => "max_iterations",
            Termination::RejectionBudget => "rejection_budget",
        })
    }
}

/// A dead (or final live) point with its normalized posterior weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub theta: Vec<f64>,
    pub log_l: f64,
    /// `ln(L_i w_i / Z)`.
    pub log_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceResult {
    pub model: String,
    /// Coefficient prior tag, e.g. `[-10,10]`.
    #[serde(default)]
    pub prior: String,
    /// σ treatment tag, `est` or the fixed value.
    #[serde(default)]
    pub sigma: String,
    pub param_names: Vec<String>,
    pub config: SamplerConfig,
    pub log_z: f64,
    pub log_z_err: f64,
    /// KL divergence from prior to posterior, in nats.
    pub information: f64,
    /// Likelihood evaluations including the initial live set.
    pub n_calls: u64,
    pub n_iter: u64,
    pub termination: Termination,
    pub plateau_warning: bool,
    /// `ln X_i` after each iteration.
    pub log_volumes: Vec<f64>,
    /// Points with zero weight are dropped.
    pub samples: Vec<Sample>,
}

impl EvidenceResult {
    pub fn converged(&self) -> bool {
        self.termination.converged()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = self.to_json()?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub mean: Vec<f64>,
    /// Weighted population standard deviation.
    pub std: Vec<f64>,
    /// Kish effective sample size of the weights.
    pub effective_samples: f64,
    /// True when one sample carries essentially all the weight.
    pub degenerate: bool,
}

/// Weighted mean and spread of each parameter.
pub fn posterior_summary(result: &EvidenceResult) -> Result<PosteriorSummary> {
    let Some(first) = result.samples.first() else {
        return Err(Error::Specification(
            "result holds no weighted samples".into(),
        ));
    };
    let d = first.theta.len();
    let max_lw = result
        .samples
        .iter()
        .map(|s| s.log_weight)
        .fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = result
        .samples
        .iter()
        .map(|s| (s.log_weight - max_lw).exp())
        .collect();
    let total: f64 = w.iter().sum();
    let sum_sq: f64 = w.iter().map(|x| x * x).sum();
    let effective_samples = total * total / sum_sq;

    let mut mean = vec![0.0; d];
    for (s, wi) in result.samples.iter().zip(&w) {
        for (m, t) in mean.iter_mut().zip(&s.theta) {
            *m += wi * t;
        }
    }
    mean.iter_mut().for_each(|m| *m /= total);
    let mut var = vec![0.0; d];
    for (s, wi) in result.samples.iter().zip(&w) {
        for ((v, t), m) in var.iter_mut().zip(&s.theta).zip(&mean) {
            *v += wi * (t - m) * (t - m);
        }
    }
    let std = var
        .into_iter()
        .map(|v| (v / total).max(0.0).sqrt())
        .collect();
    Ok(PosteriorSummary {
        mean,
        std,
        effective_samples,
        degenerate: effective_samples < 1.0 + 1e-6,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BayesFactor {
    /// `ln(Z_a / Z_b)`.
    pub log_bf: f64,
    pub err: f64,
}

/// Log Bayes factor of `a` over `b` with errors added in quadrature.
pub fn bayes_factor(a: &EvidenceResult, b: &EvidenceResult) -> Result<BayesFactor> {
    for r in [a, b] {
        if !r.converged() {
            return Err(Error::NotConverged(format!(
                "{} (stopped on {})",
                r.model, r.termination
            )));
        }
    }
    Ok(BayesFactor {
        log_bf: a.log_z - b.log_z,
        err: a.log_z_err.hypot(b.log_z_err),
    })
}
