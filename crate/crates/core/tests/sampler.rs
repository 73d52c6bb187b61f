use fuzzy_evidence::math::log_unit_ball_volume;
use fuzzy_evidence::sampler::{
    bayes_factor, bounding_ellipsoid, multi_decompose, posterior_summary, run, EvidenceResult,
    Method, Problem, RegionOptions, SamplerConfig, Termination,
};
use fuzzy_evidence::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

struct Constant {
    d: usize,
    log_c: f64,
}

impl Problem for Constant {
    fn dim(&self) -> usize {
        self.d
    }

    fn transform(&self, unit: &[f64], theta: &mut [f64]) {
        theta.copy_from_slice(unit);
    }

    fn log_likelihood(&self, _: &[f64]) -> f64 {
        self.log_c
    }
}

/// Normal(0, 0.1) density under a uniform prior on `[0, 1]`: half the
/// Gaussian mass lies inside, so `Z = 1/2`.
struct HalfGaussian;

impl Problem for HalfGaussian {
    fn dim(&self) -> usize {
        1
    }

    fn transform(&self, unit: &[f64], theta: &mut [f64]) {
        theta[0] = unit[0];
    }

    fn log_likelihood(&self, theta: &[f64]) -> f64 {
        let s = 0.1;
        -0.5 * (2.0 * std::f64::consts::PI * s * s).ln() - theta[0] * theta[0] / (2.0 * s * s)
    }
}

/// Composite Simpson rule for `∫₀¹ L(x) dx`.
fn simpson(problem: &impl Problem, n: usize) -> f64 {
    let h = 1.0 / n as f64;
    let f = |x: f64| problem.log_likelihood(&[x]).exp();
    let inner: f64 = (1..n)
        .map(|i| f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    (f(0.0) + f(1.0) + inner) * h / 3.0
}

fn config(method: Method, seed: u64) -> SamplerConfig {
    SamplerConfig {
        method,
        seed,
        ..SamplerConfig::default()
    }
}

fn log_sum_exp(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = v.clone().fold(f64::NEG_INFINITY, f64::max);
    m + v.map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn half_gaussian_runs() -> Vec<EvidenceResult> {
    Method::ALL
        .iter()
        .map(|&m| run(&HalfGaussian, &config(m, 4)).unwrap())
        .collect()
}

#[test]
fn constant_likelihood_gives_its_value() {
    for method in Method::ALL {
        let r = run(&Constant { d: 3, log_c: -2.5 }, &config(method, 1)).unwrap();
        assert!((r.log_z + 2.5).abs() < 1e-12, "{method}: {}", r.log_z);
        assert_eq!(r.termination, Termination::Plateau);
    }
}

#[test]
fn half_gaussian_matches_quadrature() {
    let oracle = simpson(&HalfGaussian, 20_000).ln();
    assert!((oracle - 0.5f64.ln()).abs() < 1e-9);
    for r in half_gaussian_runs() {
        assert!(r.converged());
        assert!(
            (r.log_z - oracle).abs() <= 3.0 * r.log_z_err,
            "{}: {} ± {} vs {oracle}",
            r.config.method,
            r.log_z,
            r.log_z_err
        );
    }
}

#[test]
fn dead_points_rise_and_weights_normalize() {
    for r in half_gaussian_runs() {
        let dead = &r.samples[..r.n_iter as usize];
        assert!(dead.windows(2).all(|w| w[0].log_l <= w[1].log_l));
        assert!(r.n_calls >= r.config.n_live as u64 + r.n_iter);
        let total = log_sum_exp(r.samples.iter().map(|s| s.log_weight));
        assert!(total.abs() < 1e-9, "weights sum to exp({total})");
        assert!(r.log_volumes.windows(2).all(|w| w[1] < w[0]));
        assert!((r.log_z_err - (r.information / r.config.n_live as f64).sqrt()).abs() < 1e-15);
    }
}

#[test]
fn posterior_mean_of_half_gaussian() {
    // E[x | 0 ≤ x] for Normal(0, 0.1) is 0.1·√(2/π)
    let expected = 0.1 * (2.0 / std::f64::consts::PI).sqrt();
    for r in half_gaussian_runs() {
        let s = posterior_summary(&r).unwrap();
        assert!(
            (s.mean[0] - expected).abs() < 0.02,
            "{}: {}",
            r.config.method,
            s.mean[0]
        );
    }
}

#[test]
fn same_seed_same_bytes_other_seed_differs() {
    for method in Method::ALL {
        let a = run(&HalfGaussian, &config(method, 9))
            .unwrap()
            .to_json()
            .unwrap();
        let b = run(&HalfGaussian, &config(method, 9))
            .unwrap()
            .to_json()
            .unwrap();
        let c = run(&HalfGaussian, &config(method, 10))
            .unwrap()
            .to_json()
            .unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}

#[test]
fn result_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let r = run(&HalfGaussian, &config(Method::Multi, 2)).unwrap();
    r.save(&path).unwrap();
    assert_eq!(EvidenceResult::load(&path).unwrap(), r);
}

#[test]
fn iteration_cap_is_flagged() {
    let cfg = SamplerConfig {
        max_iterations: 10,
        ..config(Method::Single, 1)
    };
    let r = run(&HalfGaussian, &cfg).unwrap();
    assert_eq!(r.termination, Termination::MaxIterations);
    assert!(!r.converged());
    let ok = run(&HalfGaussian, &config(Method::Single, 1)).unwrap();
    assert!(matches!(bayes_factor(&ok, &r), Err(Error::NotConverged(_))));
    let bf = bayes_factor(&ok, &ok).unwrap();
    assert_eq!(bf.log_bf, 0.0);
}

#[test]
fn zero_likelihood_everywhere_fails_to_start() {
    let err = run(
        &Constant {
            d: 2,
            log_c: f64::NEG_INFINITY,
        },
        &config(Method::Multi, 0),
    )
    .unwrap_err();
    assert!(matches!(err, Error::Initialization(50)));
}

#[test]
fn invalid_config_is_rejected() {
    for bad in [
        SamplerConfig {
            n_live: 1,
            ..SamplerConfig::default()
        },
        SamplerConfig {
            tol: 0.0,
            ..SamplerConfig::default()
        },
        SamplerConfig {
            enlargement: 0.5,
            ..SamplerConfig::default()
        },
    ] {
        assert!(run(&HalfGaussian, &bad).is_err());
    }
}

fn uniform_in_ball(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let g: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    let r = rng.random::<f64>().powf(1.0 / d as f64);
    g.iter().map(|v| v / norm * r).collect()
}

#[test]
fn bounding_ellipsoid_of_ball_samples_has_ball_volume() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for d in [2, 3, 5] {
        let pts: Vec<Vec<f64>> = (0..100).map(|_| uniform_in_ball(&mut rng, d)).collect();
        let e = bounding_ellipsoid(&pts, 1.0).unwrap();
        let ratio = (e.log_volume() - log_unit_ball_volume(d)).exp();
        assert!(
            (0.5..=2.0).contains(&ratio),
            "d = {d}: volume ratio {ratio}"
        );
        assert!(pts.iter().all(|p| e.contains(p)));
    }
}

fn blob(rng: &mut ChaCha8Rng, center: [f64; 2], sigma: f64, n: usize) -> Vec<Vec<f64>> {
    let g = Normal::new(0.0, sigma).unwrap();
    (0..n)
        .map(|_| center.iter().map(|c| c + g.sample(rng)).collect())
        .collect()
}

#[test]
fn decomposition_counts_blobs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let opts = RegionOptions::default();
    let one = blob(&mut rng, [0.5, 0.5], 0.04, 100);
    assert_eq!(multi_decompose(&one, &opts, &mut rng).unwrap().len(), 1);
    let mut two = blob(&mut rng, [0.3, 0.5], 0.04, 50);
    two.extend(blob(&mut rng, [0.7, 0.5], 0.04, 50));
    let ells = multi_decompose(&two, &opts, &mut rng).unwrap();
    assert_eq!(ells.len(), 2);
    assert!(two.iter().all(|p| ells.iter().any(|e| e.contains(p))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn constant_likelihood_any_level(log_c in -50.0..50.0f64, d in 1usize..4, n_live in 2usize..60, seed in any::<u64>()) {
        let cfg = SamplerConfig { n_live, seed, ..SamplerConfig::default() };
        let r = run(&Constant { d, log_c }, &cfg).unwrap();
        prop_assert!((r.log_z - log_c).abs() < 1e-9);
    }

    #[test]
    fn evidence_is_invariant_to_likelihood_offset(offset in -100.0..100.0f64, seed in 0u64..1000) {
        struct Shifted(f64);
        impl Problem for Shifted {
            fn dim(&self) -> usize { 1 }
            fn transform(&self, unit: &[f64], theta: &mut [f64]) { theta[0] = unit[0]; }
            fn log_likelihood(&self, theta: &[f64]) -> f64 { HalfGaussian.log_likelihood(theta) + self.0 }
        }
        let a = run(&HalfGaussian, &config(Method::Multi, seed)).unwrap();
        let b = run(&Shifted(offset), &config(Method::Multi, seed)).unwrap();
        prop_assert!((b.log_z - a.log_z - offset).abs() < 1e-9);
        prop_assert_eq!(a.n_calls, b.n_calls);
    }
}
