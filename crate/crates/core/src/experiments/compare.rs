use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::plan::ExperimentPlan;
use crate::error::{Error, Result};
use crate::math::stable_hash;
use crate::model::{Dataset, ModelSpec, SigmaMode};
use crate::sampler::{
    posterior_summary, run, EvidenceResult, Method, PosteriorSummary, SamplerConfig,
};

/// One (model, method, prior, σ) cell of a comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub model: String,
    pub method: Method,
    pub prior: String,
    pub sigma: String,
    pub log_z: f64,
    pub log_z_err: f64,
    pub n_calls: u64,
    pub converged: bool,
}

impl ComparisonRow {
    pub fn from_result(r: &EvidenceResult) -> Self {
        Self {
            model: r.model.clone(),
            method: r.config.method,
            prior: r.prior.clone(),
            sigma: r.sigma.clone(),
            log_z: r.log_z,
            log_z_err: r.log_z_err,
            n_calls: r.n_calls,
            converged: r.converged(),
        }
    }
}

/// A finished cell: its table row and, when the run produced one, the full
/// result.
#[derive(Debug, Clone)]
pub struct Cell {
    pub row: ComparisonRow,
    pub result: Option<EvidenceResult>,
}

/// Posterior means and spreads of one cell, one entry per parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorRow {
    pub model: String,
    pub method: Method,
    pub prior: String,
    pub sigma: String,
    pub names: Vec<String>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl PosteriorRow {
    /// `None` when the result holds no weighted samples.
    pub fn from_result(r: &EvidenceResult) -> Option<Self> {
        let PosteriorSummary { mean, std, .. } = posterior_summary(r).ok()?;
        Some(Self {
            model: r.model.clone(),
            method: r.config.method,
            prior: r.prior.clone(),
            sigma: r.sigma.clone(),
            names: r.param_names.clone(),
            mean,
            std,
        })
    }
}

/// Runs the sampler on `spec` against `data` and tags the result with the
/// model's name, prior, σ treatment and parameter names.
pub fn run_evidence(
    spec: &ModelSpec,
    data: &Dataset,
    config: &SamplerConfig,
) -> Result<EvidenceResult> {
    let bound = spec.bind(data)?;
    let mut result = run(&bound, config)?;
    result.model = spec.name().to_string();
    result.prior = spec.prior_tag();
    result.sigma = spec.sigma().tag();
    result.param_names = spec.param_names();
    Ok(result)
}

/// Seed of one cell, derived from the master seed and the cell's identity
/// so that adding or removing cells never changes the others.
pub fn cell_seed(master: u64, model: &str, method: Method, prior: &str, sigma: &str) -> u64 {
    stable_hash(&[
        &master.to_le_bytes(),
        model.as_bytes(),
        method.as_str().as_bytes(),
        prior.as_bytes(),
        sigma.as_bytes(),
    ])
}

/// Descending log-evidence, then by identity so ties order deterministically.
pub fn compare_rows(a: &ComparisonRow, b: &ComparisonRow) -> Ordering {
    b.log_z
        .total_cmp(&a.log_z)
        .then_with(|| a.model.cmp(&b.model))
        .then_with(|| a.method.as_str().cmp(b.method.as_str()))
        .then_with(|| a.prior.cmp(&b.prior))
        .then_with(|| a.sigma.cmp(&b.sigma))
}

struct Job {
    spec: ModelSpec,
    method: Method,
    seed: u64,
}

fn run_job(job: &Job, data: &Dataset, plan: &ExperimentPlan) -> Result<Cell> {
    let spec = &job.spec;
    let config = plan.sampler.config(job.method, job.seed);
    let outcome = run_evidence(spec, data, &config);
    let mut row = ComparisonRow {
        model: spec.name().to_string(),
        method: job.method,
        prior: spec.prior_tag(),
        sigma: spec.sigma().tag(),
        log_z: f64::NEG_INFINITY,
        log_z_err: 0.0,
        n_calls: config.n_live as u64,
        converged: false,
    };
    match outcome {
        Ok(result) => {
            row.log_z = result.log_z;
            row.log_z_err = result.log_z_err;
            row.n_calls = result.n_calls;
            row.converged = result.converged();
            if !row.converged {
                log::warn!(
                    "{} / {}: stopped on {}",
                    row.model,
                    row.method,
                    result.termination
                );
            }
            Ok(Cell {
                row,
                result: Some(result),
            })
        }
        Err(e @ Error::Initialization(_)) => {
            log::warn!("{} / {}: {e}", row.model, row.method);
            Ok(Cell { row, result: None })
        }
        Err(e) => Err(e),
    }
}

fn run_jobs(
    jobs: Vec<Job>,
    data: &Dataset,
    plan: &ExperimentPlan,
    workers: Option<usize>,
) -> Result<Vec<Cell>> {
    let exec = || {
        jobs.par_iter()
            .map(|j| run_job(j, data, plan))
            .collect::<Result<Vec<_>>>()
    };
    let mut cells = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Specification(format!("cannot start worker pool: {e}")))?
            .install(exec)?,
        None => exec()?,
    };
    cells.sort_by(|a, b| compare_rows(&a.row, &b.row));
    Ok(cells)
}

fn jobs_for(plan: &ExperimentPlan, sigma: Option<SigmaMode>) -> Result<Vec<Job>> {
    let mut jobs = Vec::new();
    for model in plan.resolve_roster()? {
        let spec = match sigma {
            Some(s) => model.spec.with_sigma(s)?,
            None => model.spec,
        };
        for &method in &plan.sampler.methods {
            let seed = cell_seed(
                plan.sampler.seed,
                spec.name(),
                method,
                &spec.prior_tag(),
                &spec.sigma().tag(),
            );
            jobs.push(Job {
                spec: spec.clone(),
                method,
                seed,
            });
        }
    }
    Ok(jobs)
}

/// Runs every (model, method) cell of the plan, or every
/// (model, method, σ) cell when the plan has a sigma block.
///
/// Cells run in parallel on `workers` threads (all cores when `None`).
/// Cells are returned sorted by descending log-evidence.
pub fn run_cells(plan: &ExperimentPlan, workers: Option<usize>) -> Result<Vec<Cell>> {
    plan.validate()?;
    let data = plan.load_dataset()?;
    let mut jobs = Vec::new();
    match plan.sigma_modes()? {
        Some(modes) => {
            for s in modes {
                jobs.extend(jobs_for(plan, Some(s))?);
            }
        }
        None => jobs = jobs_for(plan, None)?,
    }
    run_jobs(jobs, &data, plan, workers)
}

/// Table rows of [`run_cells`].
pub fn run_comparison(plan: &ExperimentPlan, workers: Option<usize>) -> Result<Vec<ComparisonRow>> {
    Ok(run_cells(plan, workers)?
        .into_iter()
        .map(|c| c.row)
        .collect())
}

/// One comparison per σ treatment, in the order given.
#[derive(Debug, Clone)]
pub struct SigmaGroup {
    pub sigma: SigmaMode,
    pub cells: Vec<Cell>,
}

/// Runs the roster once per σ treatment.
pub fn sigma_regime_sweep(
    plan: &ExperimentPlan,
    sigmas: &[SigmaMode],
    workers: Option<usize>,
) -> Result<Vec<SigmaGroup>> {
    plan.validate()?;
    if sigmas.is_empty() {
        return Err(Error::Specification("no sigma values to sweep".into()));
    }
    let data = plan.load_dataset()?;
    sigmas
        .iter()
        .map(|&sigma| {
            sigma.validate()?;
            let cells = run_jobs(jobs_for(plan, Some(sigma))?, &data, plan, workers)?;
            Ok(SigmaGroup { sigma, cells })
        })
        .collect()
}

/// Posterior rows for every cell that produced samples.
pub fn posterior_rows(cells: &[Cell]) -> Vec<PosteriorRow> {
    cells
        .iter()
        .filter_map(|c| PosteriorRow::from_result(c.result.as_ref()?))
        .collect()
}
