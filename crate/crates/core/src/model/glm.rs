use crate::error::{Error, Result};

/// A polynomial linear predictor `μ = Σ_t α_t Π_j x_j^{e_tj}`.
///
/// Term `t` owns coefficient `α_t`; the intercept is the all-zero exponent
/// tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlmTerms {
    covariates: Vec<String>,
    exponents: Vec<Vec<u32>>,
}

impl GlmTerms {
    pub fn new(covariates: Vec<String>, exponents: Vec<Vec<u32>>) -> Result<Self> {
        if covariates.is_empty() {
            return Err(Error::Specification("GLM names no covariates".into()));
        }
        if exponents.is_empty() {
            return Err(Error::Specification("GLM has no terms".into()));
        }
        for (t, e) in exponents.iter().enumerate() {
            if e.len() != covariates.len() {
                return Err(Error::Specification(format!(
                    "term {t} has {} exponents for {} covariates",
                    e.len(),
                    covariates.len()
                )));
            }
        }
        for (t, e) in exponents.iter().enumerate() {
            if exponents[..t].contains(e) {
                return Err(Error::Specification(format!(
                    "term {t} repeats monomial {e:?}"
                )));
            }
        }
        Ok(Self {
            covariates,
            exponents,
        })
    }

    pub fn covariates(&self) -> &[String] {
        &self.covariates
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    pub fn coefficient_count(&self) -> usize {
        self.exponents.len()
    }

    pub fn has_intercept(&self) -> bool {
        self.exponents.iter().any(|e| e.iter().all(|&p| p == 0))
    }

    /// Mean for covariates `x`, ordered like [`Self::covariates`].
    pub fn mean(&self, alpha: &[f64], x: &[f64]) -> Result<f64> {
        if alpha.len() != self.exponents.len() {
            return Err(Error::Specification(format!(
                "GLM has {} terms, got {} coefficients",
                self.exponents.len(),
                alpha.len()
            )));
        }
        if x.len() != self.covariates.len() {
            return Err(Error::Specification(format!(
                "GLM uses {} covariates, got {}",
                self.covariates.len(),
                x.len()
            )));
        }
        Ok(self.mean_unchecked(alpha, x))
    }

    #[inline]
    pub(crate) fn mean_unchecked(&self, alpha: &[f64], x: &[f64]) -> f64 {
        self.exponents
            .iter()
            .zip(alpha)
            .map(|(e, a)| {
                a * e
                    .iter()
                    .zip(x)
                    .map(|(&p, &xi)| xi.powi(p as i32))
                    .product::<f64>()
            })
            .sum()
    }
}

/// Free-function form of [`GlmTerms::mean`].
pub fn glm_mean(terms: &GlmTerms, alpha: &[f64], x: &[f64]) -> Result<f64> {
    terms.mean(alpha, x)
}
