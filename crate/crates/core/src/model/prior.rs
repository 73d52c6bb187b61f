use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Independent uniform priors on a box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl PriorBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::Specification(format!(
                "prior bounds have lengths {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        if let Some(j) = (0..lower.len())
            .find(|&j| !(lower[j].is_finite() && upper[j].is_finite() && lower[j] < upper[j]))
        {
            return Err(Error::Specification(format!(
                "prior interval {j} is [{}, {}]; need lower < upper",
                lower[j], upper[j]
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// `ln` of the box volume.
    pub fn log_volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| (u - l).ln())
            .sum()
    }

    /// Appends one dimension.
    pub fn extended(&self, lower: f64, upper: f64) -> Result<Self> {
        let mut lo = self.lower.clone();
        let mut hi = self.upper.clone();
        lo.push(lower);
        hi.push(upper);
        Self::new(lo, hi)
    }

    /// Maps a point of the unit cube into the box, writing into `theta`.
    #[inline]
    pub fn transform_into(&self, unit: &[f64], theta: &mut [f64]) {
        for (j, t) in theta.iter_mut().enumerate() {
            *t = self.lower[j] + unit[j] * (self.upper[j] - self.lower[j]);
        }
    }

    pub fn inverse(&self, theta: &[f64]) -> Vec<f64> {
        theta
            .iter()
            .enumerate()
            .map(|(j, t)| (t - self.lower[j]) / (self.upper[j] - self.lower[j]))
            .collect()
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == self.dim()
            && theta
                .iter()
                .enumerate()
                .all(|(j, t)| (self.lower[j]..=self.upper[j]).contains(t))
    }
}

/// Componentwise affine map from `[0,1]^d` onto the prior box.
pub fn prior_transform(unit: &[f64], prior: &PriorBox) -> Result<Vec<f64>> {
    if unit.len() != prior.dim() {
        return Err(Error::Specification(format!(
            "unit vector has {} components, prior has {}",
            unit.len(),
            prior.dim()
        )));
    }
    if let Some(u) = unit.iter().find(|u| !(0.0..=1.0).contains(*u)) {
        return Err(Error::Domain(format!("unit coordinate {u} outside [0, 1]")));
    }
    let mut theta = vec![0.0; unit.len()];
    prior.transform_into(unit, &mut theta);
    Ok(theta)
}
