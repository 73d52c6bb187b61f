use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::math::{log_add_exp, log_sub_exp};

/// How the enclosed prior mass shrinks per iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShrinkageMode {
    /// `ln X_i = −i/N`, the expectation of `ln t` with `t ~ Beta(N, 1)`.
    #[default]
    Deterministic,
    /// `ln X_i = ln X_{i−1} + ln t` with `t ~ Beta(N, 1)` drawn from the run's
    /// random stream.
    Stochastic,
}

/// `ln X_i` under deterministic shrinkage.
pub fn shrink_log_mass(i: u64, n_live: usize) -> f64 {
    -(i as f64) / n_live as f64
}

/// Draws `ln t` for `t ~ Beta(N, 1)`. The largest of N uniforms has this
/// law, so `ln t = ln(U) / N`.
pub fn sample_log_shrinkage<R: Rng + ?Sized>(n_live: usize, rng: &mut R) -> f64 {
    // open interval (0, 1] keeps ln finite
    let u: f64 = 1.0 - rng.random::<f64>();
    u.ln() / n_live as f64
}

/// Tracks `ln X_i` across iterations.
#[derive(Debug, Clone)]
pub struct Shrinkage {
    mode: ShrinkageMode,
    n_live: usize,
    iteration: u64,
    log_x: f64,
}

impl Shrinkage {
    pub fn new(mode: ShrinkageMode, n_live: usize) -> Self {
        Self {
            mode,
            n_live,
            iteration: 0,
            log_x: 0.0,
        }
    }

    pub fn log_x(&self) -> f64 {
        self.log_x
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    /// Advances one iteration and returns the new `ln X_i`.
    pub fn advance<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        self.iteration += 1;
        self.log_x = match self.mode {
            ShrinkageMode::Deterministic => shrink_log_mass(self.iteration, self.n_live),
            ShrinkageMode::Stochastic => self.log_x + sample_log_shrinkage(self.n_live, rng),
        };
        self.log_x
    }
}

/// Adds the shell `L_i · (X_{i−1} − X_i)` to a running `ln Z`.
#[inline]
pub fn accumulate(log_z: f64, log_l: f64, log_x_prev: f64, log_x: f64) -> f64 {
    log_add_exp(log_z, log_l + log_sub_exp(log_x_prev, log_x))
}

/// True once the largest possible remaining contribution `L_max · X_i` would
/// raise `ln Z` by less than `tol`.
pub fn should_terminate(log_z: f64, log_l_max: f64, log_x: f64, tol: f64) -> bool {
    let remaining = log_l_max + log_x;
    if remaining == f64::NEG_INFINITY {
        return true;
    }
    if log_z == f64::NEG_INFINITY {
        return false;
    }
    log_add_exp(log_z, remaining) - log_z < tol
}
