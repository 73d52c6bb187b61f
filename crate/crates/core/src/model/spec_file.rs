//! Model-spec documents (TOML).
//!
//! A fuzzy document declares `[[inputs]]`, an `[output]` set and `rules`;
//! a GLM document declares a `[glm]` table with covariates and exponent
//! tuples. Both may carry `[prior]` and `[sigma]` tables:
//!
//! ```toml
//! name = "glm2"
//!
//! [glm]
//! covariates = ["loc_risk", "maintenance"]
//! terms = [[0, 0], [1, 0], [0, 1]]
//!
//! [prior]
//! range = [-50, 50]
//!
//! [sigma]
//! mode = "estimated"
//! range = [0.01, 50]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::glm::GlmTerms;
use super::spec::{ModelKind, ModelSpec, SigmaMode, DEFAULT_SIGMA_RANGE};
use crate::error::{Error, Result};
use crate::fuzzy::{ReferentialSet, Rule, RuleBase, Universe};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rules: Vec<String>,
    /// Zero-based indices of rules stored with their inclusion flag off.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub excluded_rules: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<SetDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<SetDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub glm: Option<GlmDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<PriorDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<SigmaDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetDocument {
    pub name: String,
    pub universe: [f64; 2],
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlmDocument {
    pub covariates: Vec<String>,
    pub terms: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorDocument {
    pub range: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum SigmaDocument {
    Estimated {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        range: Option<[f64; 2]>,
    },
    Fixed {
        value: f64,
    },
}

impl SetDocument {
    fn build(&self) -> Result<ReferentialSet> {
        let labels: Vec<&str> = self.labels.iter().map(String::as_str).collect();
        ReferentialSet::new(
            self.name.clone(),
            &labels,
            Universe::new(self.universe[0], self.universe[1])?,
        )
    }
}

impl SpecDocument {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec documents always serialize")
    }

    pub fn build(&self) -> Result<ModelSpec> {
        let kind = match (&self.glm, self.output.as_ref()) {
            (Some(glm), None) if self.rules.is_empty() && self.inputs.is_empty() => {
                ModelKind::Glm(GlmTerms::new(glm.covariates.clone(), glm.terms.clone())?)
            }
            (None, Some(output)) => {
                let inputs = self
                    .inputs
                    .iter()
                    .map(SetDocument::build)
                    .collect::<Result<Vec<_>>>()?;
                let mut rules = Vec::with_capacity(self.rules.len());
                for (i, text) in self.rules.iter().enumerate() {
                    let rule: Rule = text.parse().map_err(|e| match e {
                        Error::Parse { message, .. } => Error::Parse {
                            line: 0,
                            message: format!("rule {i}: {message}"),
                        },
                        other => other,
                    })?;
                    rules.push(rule.with_included(!self.excluded_rules.contains(&i)));
                }
                if let Some(&bad) = self.excluded_rules.iter().find(|&&i| i >= rules.len()) {
                    return Err(Error::Specification(format!(
                        "excluded rule {bad} does not exist"
                    )));
                }
                ModelKind::Fuzzy(RuleBase::new(inputs, output.build()?, rules)?)
            }
            _ => {
                return Err(Error::Specification(format!(
                    "model `{}` must declare either a [glm] table or inputs, an output and rules",
                    self.name
                )))
            }
        };
        let sigma = match self.sigma {
            None => SigmaMode::default(),
            Some(SigmaDocument::Fixed { value }) => SigmaMode::fixed(value)?,
            Some(SigmaDocument::Estimated { range }) => {
                let [lo, hi] = range.unwrap_or([DEFAULT_SIGMA_RANGE.0, DEFAULT_SIGMA_RANGE.1]);
                SigmaMode::estimated(lo, hi)?
            }
        };
        let spec = ModelSpec::new(self.name.clone(), kind, sigma)?;
        match self.prior {
            Some(PriorDocument { range: [lo, hi] }) => spec.with_coefficient_range(lo, hi),
            None => Ok(spec),
        }
    }
}

/// Parses and builds a model spec from TOML text.
pub fn parse_model_spec(text: &str) -> Result<ModelSpec> {
    SpecDocument::parse(text)?.build()
}
