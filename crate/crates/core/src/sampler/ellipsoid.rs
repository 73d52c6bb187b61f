use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::math::log_unit_ball_volume;

/// `{u : (u − c)ᵀ S⁻¹ (u − c) ≤ scale}`.
#[derive(Debug, Clone)]
pub struct Ellipsoid {
    center: DVector<f64>,
    shape: DMatrix<f64>,
    scale: f64,
    inv_shape: DMatrix<f64>,
    /// Lower Cholesky factor of `shape`.
    chol: DMatrix<f64>,
    log_det_shape: f64,
}

impl Ellipsoid {
    /// Fails when `shape` is not symmetric positive-definite.
    pub fn new(center: DVector<f64>, shape: DMatrix<f64>, scale: f64) -> Result<Self> {
        let d = center.len();
        if shape.nrows() != d || shape.ncols() != d {
            return Err(Error::Specification(format!(
                "ellipsoid shape is {}x{}, center has {d} entries",
                shape.nrows(),
                shape.ncols()
            )));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Domain(format!(
                "ellipsoid scale must be positive, got {scale}"
            )));
        }
        let chol = shape
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Domain("ellipsoid shape is not positive-definite".into()))?;
        let l = chol.l();
        let log_det_shape = 2.0 * l.diagonal().iter().map(|v| v.ln()).sum::<f64>();
        let inv_shape = chol.inverse();
        Ok(Self {
            center,
            shape,
            scale,
            inv_shape,
            chol: l,
            log_det_shape,
        })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Squared Mahalanobis distance of `u` from the center under `shape`.
    pub fn mahalanobis2(&self, u: &[f64]) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for i in 0..d {
            let di = u[i] - self.center[i];
            let mut row = 0.0;
            for j in 0..d {
                row += self.inv_shape[(i, j)] * (u[j] - self.center[j]);
            }
            acc += di * row;
        }
        acc
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        self.mahalanobis2(u) <= self.scale
    }

    pub fn log_volume(&self) -> f64 {
        let d = self.dim() as f64;
        log_unit_ball_volume(self.dim()) + 0.5 * d * self.scale.ln() + 0.5 * self.log_det_shape
    }

    /// Grows the ellipsoid (about its center) to at least `log_volume`.
    pub fn expand_to(&mut self, log_volume: f64) {
        let current = self.log_volume();
        if current < log_volume {
            self.scale *= (2.0 * (log_volume - current) / self.dim() as f64).exp();
        }
    }

    /// A point drawn uniformly from the interior.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let d = self.dim();
        let mut z: DVector<f64> = DVector::from_fn(d, |_, _| rng.sample(StandardNormal));
        let norm = z.norm();
        let radius = rng.random::<f64>().powf(1.0 / d as f64);
        z *= radius * self.scale.sqrt() / norm;
        let u = &self.center + &self.chol * z;
        u.iter().copied().collect()
    }
}

/// Sample mean and covariance, scaled so every point is inside and then
/// enlarged by `enlargement` (applied to the squared-distance threshold).
///
/// A covariance that is singular, or built from fewer than `d + 1` points,
/// gets a small ridge on its diagonal.
pub fn bounding_ellipsoid(points: &[Vec<f64>], enlargement: f64) -> Result<Ellipsoid> {
    let Some(first) = points.first() else {
        return Err(Error::Specification(
            "cannot bound an empty point set".into(),
        ));
    };
    if !(enlargement >= 1.0) {
        return Err(Error::Domain(format!(
            "enlargement must be >= 1, got {enlargement}"
        )));
    }
    let d = first.len();
    let n = points.len();
    let mut center = DVector::zeros(d);
    for p in points {
        center += DVector::from_column_slice(p);
    }
    center /= n as f64;

    let mut cov = DMatrix::zeros(d, d);
    for p in points {
        let diff = DVector::from_column_slice(p) - &center;
        cov.syger(1.0, &diff, &diff, 1.0);
    }
    cov /= (n.max(2) - 1) as f64;

    let base_ridge = 1e-10 + 1e-8 * (cov.trace() / d as f64).max(0.0);
    let mut ridge = if n < d + 1 { base_ridge } else { 0.0 };
    let mut attempts = 0;
    let mut ell = loop {
        let mut shape = cov.clone();
        for i in 0..d {
            shape[(i, i)] += ridge;
        }
        // scale is fixed below once the Mahalanobis radius is known
        match Ellipsoid::new(center.clone(), shape, 1.0) {
            Ok(e) => break e,
            Err(e) if attempts >= 30 => return Err(e),
            Err(_) => {
                attempts += 1;
                ridge = if ridge == 0.0 {
                    base_ridge
                } else {
                    ridge * 10.0
                };
            }
        }
    };
    let max_m2 = points
        .iter()
        .map(|p| ell.mahalanobis2(p))
        .fold(0.0f64, f64::max);
    // all points at the center: fall back to a tiny sphere-like radius
    ell.scale = if max_m2 > 0.0 {
        max_m2 * enlargement
    } else {
        enlargement * 1e-12
    };
    Ok(ell)
}
