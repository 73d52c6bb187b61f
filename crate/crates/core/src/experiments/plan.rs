//! Experiment plans (TOML).
//!
//! ```toml
//! name = "synthetic"
//! roster = ["h_true", "h1", { model = "glm6", prior = [-100, 100] }]
//!
//! [dataset]
//! kind = "synthetic"
//! seed = 7
//! rows = 50
//!
//! [sampler]
//! methods = ["single", "multi"]
//! n_live = 50
//! tol = 0.5
//! seed = 1
//!
//! [sigma]
//! modes = ["est", 0.25, 1.0]
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::catalog::builtin_spec;
use super::data::{generate_stand_in, generate_synthetic, StandIn};
use crate::error::{Error, Result};
use crate::model::{Dataset, ModelSpec, SigmaMode, SpecDocument};
use crate::sampler::{Method, SamplerConfig, ShrinkageMode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub roster: Vec<RosterEntry>,
    pub dataset: DatasetSource,
    #[serde(default)]
    pub sampler: SamplerBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<SigmaBlock>,
    /// Directory relative paths in the plan resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// A roster model: a bundled name or a spec-file path, optionally with a
/// coefficient prior override.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RosterEntry {
    Name(String),
    Detailed {
        model: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prior: Option<[f64; 2]>,
    },
}

impl RosterEntry {
    pub fn model(&self) -> &str {
        match self {
            RosterEntry::Name(m) | RosterEntry::Detailed { model: m, .. } => m,
        }
    }

    pub fn prior(&self) -> Option<[f64; 2]> {
        match self {
            RosterEntry::Name(_) => None,
            RosterEntry::Detailed { prior, .. } => *prior,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSource {
    Synthetic {
        #[serde(default)]
        seed: u64,
        #[serde(default = "default_rows")]
        rows: usize,
    },
    StandIn(StandIn),
    File {
        path: PathBuf,
    },
}

fn default_rows() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerBlock {
    pub methods: Vec<Method>,
    pub n_live: usize,
    pub tol: f64,
    /// Master seed; every cell derives its own stream from it.
    pub seed: u64,
    pub enlargement: f64,
    pub split_threshold: f64,
    pub max_iterations: u64,
    pub max_attempts: u64,
    pub shrinkage: ShrinkageMode,
}

impl Default for SamplerBlock {
    fn default() -> Self {
        let c = SamplerConfig::default();
        Self {
            methods: vec![Method::Single, Method::Multi],
            n_live: c.n_live,
            tol: c.tol,
            seed: c.seed,
            enlargement: c.enlargement,
            split_threshold: c.split_threshold,
            max_iterations: c.max_iterations,
            max_attempts: c.max_attempts,
            shrinkage: c.shrinkage,
        }
    }
}

impl SamplerBlock {
    /// Sampler settings for one cell.
    pub fn config(&self, method: Method, seed: u64) -> SamplerConfig {
        SamplerConfig {
            n_live: self.n_live,
            tol: self.tol,
            method,
            enlargement: self.enlargement,
            split_threshold: self.split_threshold,
            seed,
            max_iterations: self.max_iterations,
            max_attempts: self.max_attempts,
            shrinkage: self.shrinkage,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaBlock {
    pub modes: Vec<SigmaValue>,
}

/// `"est"` or a fixed σ, written as a number or a string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SigmaValue {
    Number(f64),
    Text(String),
}

impl SigmaValue {
    pub fn resolve(&self) -> Result<SigmaMode> {
        match self {
            SigmaValue::Number(v) => SigmaMode::fixed(*v),
            SigmaValue::Text(t) => t.parse(),
        }
    }
}

impl From<SigmaMode> for SigmaValue {
    fn from(mode: SigmaMode) -> Self {
        match mode {
            SigmaMode::Fixed { sigma } => SigmaValue::Number(sigma),
            SigmaMode::Estimated { .. } => SigmaValue::Text("est".into()),
        }
    }
}

/// A roster model after name resolution and prior override.
#[derive(Debug, Clone)]
pub struct ResolvedModel {
    pub spec: ModelSpec,
    /// Whether the plan overrode the prior; σ overrides apply regardless.
    pub prior_override: bool,
}

impl ExperimentPlan {
    pub fn parse(text: &str) -> Result<Self> {
        let plan: Self = toml::from_str(text)?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut plan = Self::parse(&text)?;
        plan.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(plan)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plans always serialize")
    }

    pub fn validate(&self) -> Result<()> {
        if self.roster.is_empty() {
            return Err(Error::Specification("plan roster is empty".into()));
        }
        if self.sampler.methods.is_empty() {
            return Err(Error::Specification("plan lists no sampler methods".into()));
        }
        self.sampler.config(Method::Multi, 0).validate()?;
        for v in self.sigma.iter().flat_map(|s| &s.modes) {
            v.resolve()?;
        }
        Ok(())
    }

    fn resolve_path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn load_dataset(&self) -> Result<Dataset> {
        match &self.dataset {
            DatasetSource::Synthetic { seed, rows } => generate_synthetic(*seed, *rows),
            DatasetSource::StandIn(cfg) => generate_stand_in(cfg),
            DatasetSource::File { path } => Dataset::load(self.resolve_path(path)),
        }
    }

    /// Resolves roster names: bundled models first, then `.toml` spec files.
    pub fn resolve_roster(&self) -> Result<Vec<ResolvedModel>> {
        self.roster
            .iter()
            .map(|entry| {
                let name = entry.model();
                let spec = if name.ends_with(".toml") {
                    SpecDocument::load(self.resolve_path(Path::new(name)))?.build()?
                } else {
                    builtin_spec(name)?
                };
                let spec = match entry.prior() {
                    Some([lo, hi]) => spec.with_coefficient_range(lo, hi)?,
                    None => spec,
                };
                Ok(ResolvedModel {
                    spec,
                    prior_override: entry.prior().is_some(),
                })
            })
            .collect()
    }

    /// σ treatments the plan sweeps over; `None` keeps each model's own.
    pub fn sigma_modes(&self) -> Result<Option<Vec<SigmaMode>>> {
        self.sigma
            .as_ref()
            .map(|s| s.modes.iter().map(SigmaValue::resolve).collect())
            .transpose()
    }
}
