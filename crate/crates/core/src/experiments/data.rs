use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::catalog::builtin_spec;
use crate::error::{Error, Result};
use crate::model::{Dataset, ModelKind};

/// Peaks of the generating downtime model: six input peaks at 5, three
/// output peaks at 50.
pub const THETA_TRUE: [f64; 9] = [5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 50.0, 50.0, 50.0];

/// Default peaks of the uptime model used for stand-in data.
pub const STAND_IN_PHI: [f64; 12] = [5.0; 12];

/// Default stand-in noise standard deviation, in uptime units.
pub const STAND_IN_NOISE: f64 = 0.5;

fn fuzzy_outputs(model: &str, phi: &[f64], x: &[Vec<f64>]) -> Result<Vec<f64>> {
    let spec = builtin_spec(model)?;
    let ModelKind::Fuzzy(rb) = spec.kind() else {
        return Err(Error::Specification(format!(
            "`{model}` is not a rule base"
        )));
    };
    let ev = rb.evaluator(phi)?;
    x.iter().map(|row| ev.infer(row)).collect()
}

fn uniform_rows<R: Rng>(rng: &mut R, n: usize, p: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..p).map(|_| rng.random_range(0.0..=10.0)).collect())
        .collect()
}

/// Noise-free downtime data from the generating rule base.
///
/// `loc_risk` and `maintenance` are uniform on `[0,10]`; the output is the
/// generating model's inference at [`THETA_TRUE`]. An irrelevant
/// `dummy_covar` column, also uniform on `[0,10]`, is drawn afterwards and
/// appended, so the relevant columns do not depend on it.
pub fn generate_synthetic(seed: u64, n: usize) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::Domain("dataset needs at least one row".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = uniform_rows(&mut rng, n, 2);
    let y = fuzzy_outputs("h_true", &THETA_TRUE, &x)?;
    for row in &mut x {
        row.push(rng.random_range(0.0..=10.0));
    }
    Dataset::new(
        vec![
            "loc_risk".into(),
            "maintenance".into(),
            "dummy_covar".into(),
        ],
        "downtime",
        x,
        y,
    )
}

/// Settings for uptime stand-in data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StandIn {
    pub seed: u64,
    pub rows: usize,
    /// Peaks of the generating uptime rule base.
    pub phi: Vec<f64>,
    /// Gaussian noise added to each output; 0 gives noise-free data.
    pub noise: f64,
}

impl Default for StandIn {
    fn default() -> Self {
        Self {
            seed: 0,
            rows: 40,
            phi: STAND_IN_PHI.to_vec(),
            noise: STAND_IN_NOISE,
        }
    }
}

/// Uptime data with covariates `om`, `loss_history`, `dntnf` uniform on
/// `[0,10]` and the output generated by the first uptime rule base.
pub fn generate_stand_in(cfg: &StandIn) -> Result<Dataset> {
    if cfg.rows == 0 {
        return Err(Error::Domain("dataset needs at least one row".into()));
    }
    if !(cfg.noise >= 0.0 && cfg.noise.is_finite()) {
        return Err(Error::Domain(format!(
            "noise must be non-negative, got {}",
            cfg.noise
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let x = uniform_rows(&mut rng, cfg.rows, 3);
    let mut y = fuzzy_outputs("h_rw1", &cfg.phi, &x)?;
    if cfg.noise > 0.0 {
        let normal = Normal::new(0.0, cfg.noise).expect("noise checked above");
        for v in &mut y {
            *v += normal.sample(&mut rng);
        }
    }
    Dataset::new(
        vec!["om".into(), "loss_history".into(), "dntnf".into()],
        "uptime",
        x,
        y,
    )
}
