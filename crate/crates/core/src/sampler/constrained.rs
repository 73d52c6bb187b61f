use rand::Rng;

use super::ellipsoid::Ellipsoid;
use super::Problem;
use crate::error::{Error, Result};

/// Consecutive draws tied with the contour before a plateau is reported.
pub const PLATEAU_WARNING_TIES: u64 = 1_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LivePoint {
    pub unit: Vec<f64>,
    pub theta: Vec<f64>,
    pub log_l: f64,
}

impl LivePoint {
    /// Transforms `unit` and evaluates the likelihood there.
    pub fn evaluate<P: Problem + ?Sized>(problem: &P, unit: Vec<f64>) -> Self {
        let mut theta = vec![0.0; unit.len()];
        problem.transform(&unit, &mut theta);
        let log_l = problem.log_likelihood(&theta);
        Self {
            unit,
            theta,
            log_l: if log_l.is_nan() {
                f64::NEG_INFINITY
            } else {
                log_l
            },
        }
    }
}

/// Per-replacement bookkeeping shared by the constrained samplers.
#[derive(Debug, Clone, Default)]
pub struct DrawBudget {
    /// Proposals allowed for one replacement.
    pub max_attempts: u64,
    /// Likelihood evaluations so far (across replacements).
    pub calls: u64,
    pub plateau_warning: bool,
}

impl DrawBudget {
    pub fn new(max_attempts: u64) -> Self {
        Self {
            max_attempts,
            ..Self::default()
        }
    }
}

/// Tracks ties and the attempt budget inside one replacement.
struct Attempt<'a> {
    budget: &'a mut DrawBudget,
    attempts: u64,
    ties: u64,
    threshold: f64,
}

impl<'a> Attempt<'a> {
    fn new(budget: &'a mut DrawBudget, threshold: f64) -> Self {
        Self {
            budget,
            attempts: 0,
            ties: 0,
            threshold,
        }
    }

    fn tick(&mut self) -> Result<()> {
        if self.attempts >= self.budget.max_attempts {
            return Err(Error::NonConvergence {
                attempts: self.attempts,
                threshold: self.threshold,
            });
        }
        self.attempts += 1;
        Ok(())
    }

    /// Evaluates and applies the strict `logL > λ` test.
    fn accept<P: Problem + ?Sized>(&mut self, problem: &P, unit: Vec<f64>) -> Option<LivePoint> {
        let p = LivePoint::evaluate(problem, unit);
        self.budget.calls += 1;
        if p.log_l > self.threshold {
            return Some(p);
        }
        if p.log_l == self.threshold {
            self.ties += 1;
            if self.ties >= PLATEAU_WARNING_TIES && !self.budget.plateau_warning {
                log::warn!(
                    "likelihood plateau at {}: {} consecutive tied draws",
                    self.threshold,
                    self.ties
                );
                self.budget.plateau_warning = true;
            }
        } else {
            self.ties = 0;
        }
        None
    }
}

/// Rejection sampling from the whole prior until `logL > threshold`.
pub fn constrained_sample_basic<P, R>(
    threshold: f64,
    problem: &P,
    rng: &mut R,
    budget: &mut DrawBudget,
) -> Result<LivePoint>
where
    P: Problem + ?Sized,
    R: Rng + ?Sized,
{
    let d = problem.dim();
    let mut attempt = Attempt::new(budget, threshold);
    loop {
        attempt.tick()?;
        let unit: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        if let Some(p) = attempt.accept(problem, unit) {
            return Ok(p);
        }
    }
}

/// Uniform draw from a union of ellipsoids intersected with the unit cube,
/// then the `logL > threshold` test.
///
/// An ellipsoid is picked with probability proportional to its volume and a
/// point drawn inside it. Points outside `[0,1]^d` are redrawn, and a point
/// lying in `q` ellipsoids is kept with probability `1/q` so overlaps are not
/// oversampled. Only geometrically accepted points cost a likelihood call.
pub fn sample_in_ellipsoids<P, R>(
    ellipsoids: &[Ellipsoid],
    threshold: f64,
    problem: &P,
    rng: &mut R,
    budget: &mut DrawBudget,
) -> Result<LivePoint>
where
    P: Problem + ?Sized,
    R: Rng + ?Sized,
{
    if ellipsoids.is_empty() {
        return Err(Error::Specification("no ellipsoids to sample from".into()));
    }
    let log_vols: Vec<f64> = ellipsoids.iter().map(Ellipsoid::log_volume).collect();
    let max = log_vols.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut cumulative = Vec::with_capacity(ellipsoids.len());
    let mut total = 0.0;
    for lv in &log_vols {
        total += (lv - max).exp();
        cumulative.push(total);
    }

    let mut attempt = Attempt::new(budget, threshold);
    loop {
        attempt.tick()?;
        let pick = if ellipsoids.len() == 1 {
            0
        } else {
            let r = rng.random::<f64>() * total;
            cumulative
                .iter()
                .position(|&c| r < c)
                .unwrap_or(ellipsoids.len() - 1)
        };
        let unit = ellipsoids[pick].sample(rng);
        if unit.iter().any(|u| !(0.0..=1.0).contains(u)) {
            continue;
        }
        if ellipsoids.len() > 1 {
            let q = ellipsoids
                .iter()
                .filter(|e| e.contains(&unit))
                .count()
                .max(1);
            if q > 1 && rng.random::<f64>() >= 1.0 / q as f64 {
                continue;
            }
        }
        if let Some(p) = attempt.accept(problem, unit) {
            return Ok(p);
        }
    }
}
