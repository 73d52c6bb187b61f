use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::glm::GlmTerms;
use super::prior::PriorBox;
use crate::error::{Error, Result};
use crate::fuzzy::RuleBase;
use crate::sampler::Problem;

/// Default σ prior in estimated mode, in output units.
pub const DEFAULT_SIGMA_RANGE: (f64, f64) = (0.01, 50.0);

/// Default coefficient prior for the GLM baselines.
pub const DEFAULT_GLM_RANGE: (f64, f64) = (-50.0, 50.0);

/// How the Gaussian noise scale is treated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SigmaMode {
    Fixed {
        sigma: f64,
    },
    /// σ is sampled as the last parameter, uniform on `[lower, upper]`.
    Estimated {
        lower: f64,
        upper: f64,
    },
}

impl SigmaMode {
    pub fn fixed(sigma: f64) -> Result<Self> {
        let mode = SigmaMode::Fixed { sigma };
        mode.validate()?;
        Ok(mode)
    }

    pub fn estimated(lower: f64, upper: f64) -> Result<Self> {
        let mode = SigmaMode::Estimated { lower, upper };
        mode.validate()?;
        Ok(mode)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SigmaMode::Fixed { sigma } if !(sigma > 0.0 && sigma.is_finite()) => Err(
                Error::Domain(format!("fixed sigma must be positive, got {sigma}")),
            ),
            SigmaMode::Estimated { lower, upper }
                if !(lower > 0.0 && lower < upper && upper.is_finite()) =>
            {
                Err(Error::Domain(format!(
                    "estimated sigma range [{lower}, {upper}] needs 0 < lower < upper"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn is_estimated(&self) -> bool {
        matches!(self, SigmaMode::Estimated { .. })
    }

    /// Short tag used in reports: `est`, or the fixed value.
    pub fn tag(&self) -> String {
        match self {
            SigmaMode::Estimated { .. } => "est".into(),
            SigmaMode::Fixed { sigma } => format!("{sigma}"),
        }
    }
}

impl Default for SigmaMode {
    fn default() -> Self {
        SigmaMode::Estimated {
            lower: DEFAULT_SIGMA_RANGE.0,
            upper: DEFAULT_SIGMA_RANGE.1,
        }
    }
}

impl fmt::Display for SigmaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

impl FromStr for SigmaMode {
    type Err = Error;

    /// `est` (default range) or a positive number for a fixed σ.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("est") || s.eq_ignore_ascii_case("estimated") {
            return Ok(SigmaMode::default());
        }
        let v: f64 = s.parse().map_err(|_| {
            Error::Domain(format!(
                "sigma must be `est` or a positive number, got `{s}`"
            ))
        })?;
        SigmaMode::fixed(v)
    }
}

#[derive(Debug, Clone)]
pub enum ModelKind {
    Fuzzy(RuleBase),
    Glm(GlmTerms),
}

impl ModelKind {
    /// Number of mean-function parameters (σ excluded).
    pub fn param_count(&self) -> usize {
        match self {
            ModelKind::Fuzzy(rb) => rb.param_count(),
            ModelKind::Glm(terms) => terms.coefficient_count(),
        }
    }

    /// Dataset columns the model reads, in the model's covariate order.
    pub fn covariates(&self) -> Vec<String> {
        match self {
            ModelKind::Fuzzy(rb) => rb.inputs().iter().map(|s| s.name.clone()).collect(),
            ModelKind::Glm(terms) => terms.covariates().to_vec(),
        }
    }
}

/// A candidate model: mean function, prior box and noise treatment.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    name: String,
    kind: ModelKind,
    sigma: SigmaMode,
    /// Coefficient bounds only; the σ interval is appended by [`Self::prior`].
    coefficient_prior: PriorBox,
    prior: PriorBox,
}

impl ModelSpec {
    /// Uses each peak's universe for fuzzy models and
    /// [`DEFAULT_GLM_RANGE`] for GLMs.
    pub fn new(name: impl Into<String>, kind: ModelKind, sigma: SigmaMode) -> Result<Self> {
        let coefficient_prior = match &kind {
            ModelKind::Fuzzy(rb) => {
                let us = rb.param_universes();
                PriorBox::new(
                    us.iter().map(|u| u.lower()).collect(),
                    us.iter().map(|u| u.upper()).collect(),
                )?
            }
            ModelKind::Glm(terms) => PriorBox::uniform(
                terms.coefficient_count(),
                DEFAULT_GLM_RANGE.0,
                DEFAULT_GLM_RANGE.1,
            )?,
        };
        Self::with_prior(name, kind, sigma, coefficient_prior)
    }

    pub fn with_prior(
        name: impl Into<String>,
        kind: ModelKind,
        sigma: SigmaMode,
        coefficient_prior: PriorBox,
    ) -> Result<Self> {
        sigma.validate()?;
        if coefficient_prior.dim() != kind.param_count() {
            return Err(Error::Specification(format!(
                "prior has {} dimensions, model has {} parameters",
                coefficient_prior.dim(),
                kind.param_count()
            )));
        }
        if let ModelKind::Fuzzy(rb) = &kind {
            for (j, u) in rb.param_universes().iter().enumerate() {
                if coefficient_prior.lower()[j] < u.lower()
                    || coefficient_prior.upper()[j] > u.upper()
                {
                    return Err(Error::Specification(format!(
                        "prior for `{}.{}` leaves its universe [{}, {}]",
                        rb.layout()[j].set,
                        rb.layout()[j].label,
                        u.lower(),
                        u.upper()
                    )));
                }
            }
        }
        let prior = match sigma {
            SigmaMode::Estimated { lower, upper } => coefficient_prior.extended(lower, upper)?,
            SigmaMode::Fixed { .. } => coefficient_prior.clone(),
        };
        Ok(Self {
            name: name.into(),
            kind,
            sigma,
            coefficient_prior,
            prior,
        })
    }

    /// Same model with every coefficient interval set to `[lower, upper]`.
    pub fn with_coefficient_range(&self, lower: f64, upper: f64) -> Result<Self> {
        let p = PriorBox::uniform(self.kind.param_count(), lower, upper)?;
        Self::with_prior(self.name.clone(), self.kind.clone(), self.sigma, p)
    }

    pub fn with_sigma(&self, sigma: SigmaMode) -> Result<Self> {
        Self::with_prior(
            self.name.clone(),
            self.kind.clone(),
            sigma,
            self.coefficient_prior.clone(),
        )
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn sigma(&self) -> SigmaMode {
        self.sigma
    }

    /// Full prior, σ last when estimated.
    pub fn prior(&self) -> &PriorBox {
        &self.prior
    }

    pub fn coefficient_prior(&self) -> &PriorBox {
        &self.coefficient_prior
    }

    pub fn dim(&self) -> usize {
        self.prior.dim()
    }

    pub fn is_fuzzy(&self) -> bool {
        matches!(self.kind, ModelKind::Fuzzy(_))
    }

    /// Distinct coefficient intervals, e.g. `[0,10]` or `[0,10] [0,100]`.
    pub fn prior_tag(&self) -> String {
        let mut seen: Vec<(f64, f64)> = Vec::new();
        let p = &self.coefficient_prior;
        for (&l, &u) in p.lower().iter().zip(p.upper()) {
            if !seen.contains(&(l, u)) {
                seen.push((l, u));
            }
        }
        seen.iter()
            .map(|(l, u)| format!("[{l},{u}]"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn param_names(&self) -> Vec<String> {
        let mut names: Vec<String> = match &self.kind {
            ModelKind::Fuzzy(rb) => rb
                .layout()
                .iter()
                .map(|p| format!("{}.{}", p.set, p.label))
                .collect(),
            ModelKind::Glm(t) => (0..t.coefficient_count())
                .map(|i| format!("alpha{i}"))
                .collect(),
        };
        if self.sigma.is_estimated() {
            names.push("sigma".into());
        }
        names
    }

    /// Pairs the spec with a dataset, resolving covariate columns once.
    pub fn bind<'a>(&'a self, data: &'a Dataset) -> Result<BoundModel<'a>> {
        let columns = data.column_indices(&self.kind.covariates())?;
        let xs = data
            .rows()
            .iter()
            .map(|row| columns.iter().map(|&c| row[c]).collect())
            .collect();
        Ok(BoundModel {
            spec: self,
            data,
            xs,
        })
    }
}

/// `Σ_n [−½ ln(2πσ²) − (y_n − μ_n)² / (2σ²)]`.
pub fn gaussian_log_likelihood(y: &[f64], mu: &[f64], sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    if y.len() != mu.len() {
        return Err(Error::Specification(format!(
            "{} outputs but {} means",
            y.len(),
            mu.len()
        )));
    }
    let ssr: f64 = y.iter().zip(mu).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(gaussian_from_ssr(ssr, y.len(), sigma))
}

#[inline]
fn gaussian_from_ssr(ssr: f64, n: usize, sigma: f64) -> f64 {
    let n = n as f64;
    -0.5 * n * (2.0 * std::f64::consts::PI).ln() - n * sigma.ln() - ssr / (2.0 * sigma * sigma)
}

/// A model spec with its dataset attached; what the sampler evaluates.
#[derive(Debug, Clone)]
pub struct BoundModel<'a> {
    spec: &'a ModelSpec,
    data: &'a Dataset,
    xs: Vec<Vec<f64>>,
}

impl BoundModel<'_> {
    pub fn spec(&self) -> &ModelSpec {
        self.spec
    }

    fn split<'t>(&self, theta: &'t [f64]) -> (&'t [f64], f64) {
        match self.spec.sigma {
            SigmaMode::Fixed { sigma } => (theta, sigma),
            SigmaMode::Estimated { .. } => {
                let (coef, s) = theta.split_at(theta.len() - 1);
                (coef, s[0])
            }
        }
    }

    /// Mean vector, one entry per dataset row.
    pub fn predict(&self, theta: &[f64]) -> Result<Vec<f64>> {
        Ok(self.predict_counting(theta)?.0)
    }

    /// Mean vector plus the number of rows where no fuzzy rule fired.
    pub fn predict_counting(&self, theta: &[f64]) -> Result<(Vec<f64>, usize)> {
        let n_coef = self.spec.kind.param_count();
        if theta.len() != n_coef && theta.len() != self.spec.dim() {
            return Err(Error::Specification(format!(
                "model `{}` expects {} parameters, got {}",
                self.spec.name,
                self.spec.dim(),
                theta.len()
            )));
        }
        let coef = &theta[..n_coef];
        match &self.spec.kind {
            ModelKind::Fuzzy(rb) => {
                let ev = rb.evaluator(coef)?;
                let mut empty = 0;
                let mu = self
                    .xs
                    .iter()
                    .map(|x| {
                        let inf = ev.infer_detailed(x)?;
                        empty += usize::from(!inf.fired);
                        Ok(inf.output)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((mu, empty))
            }
            ModelKind::Glm(terms) => Ok((
                self.xs
                    .iter()
                    .map(|x| terms.mean_unchecked(coef, x))
                    .collect(),
                0,
            )),
        }
    }

    pub fn log_likelihood_checked(&self, theta: &[f64]) -> Result<f64> {
        if theta.len() != self.spec.dim() {
            return Err(Error::Specification(format!(
                "model `{}` expects {} parameters, got {}",
                self.spec.name,
                self.spec.dim(),
                theta.len()
            )));
        }
        if !self.spec.prior.contains(theta) {
            return Err(Error::Domain(format!(
                "θ lies outside the prior box of `{}`",
                self.spec.name
            )));
        }
        let (coef, sigma) = self.split(theta);
        let mu = self.predict(coef)?;
        gaussian_log_likelihood(self.data.y(), &mu, sigma)
    }
}

impl Problem for BoundModel<'_> {
    fn dim(&self) -> usize {
        self.spec.dim()
    }

    fn transform(&self, unit: &[f64], theta: &mut [f64]) {
        self.spec.prior.transform_into(unit, theta);
    }

    fn log_likelihood(&self, theta: &[f64]) -> f64 {
        let (coef, sigma) = self.split(theta);
        let y = self.data.y();
        let ssr = match &self.spec.kind {
            ModelKind::Fuzzy(rb) => {
                let Ok(ev) = rb.evaluator(coef) else {
                    return f64::NEG_INFINITY;
                };
                let mut ssr = 0.0;
                for (x, yn) in self.xs.iter().zip(y) {
                    let Ok(mu) = ev.infer(x) else {
                        return f64::NEG_INFINITY;
                    };
                    ssr += (yn - mu) * (yn - mu);
                }
                ssr
            }
            ModelKind::Glm(terms) => self
                .xs
                .iter()
                .zip(y)
                .map(|(x, yn)| {
                    let r = yn - terms.mean_unchecked(coef, x);
                    r * r
                })
                .sum(),
        };
        gaussian_from_ssr(ssr, y.len(), sigma)
    }
}

/// Gaussian log-likelihood of `data` under `spec` at `theta`.
pub fn log_likelihood(spec: &ModelSpec, theta: &[f64], data: &Dataset) -> Result<f64> {
    spec.bind(data)?.log_likelihood_checked(theta)
}

/// Rowwise mean predictions of `spec` at `theta`.
pub fn predict(spec: &ModelSpec, theta: &[f64], data: &Dataset) -> Result<Vec<f64>> {
    spec.bind(data)?.predict(theta)
}
