//! Simulated long-run performance against the closed forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use seesaw::closed_form::performance;
use seesaw::simulate::{convergence_report, run, SimulationConfig};
use seesaw::{
    AsymmetricNormalModel, EquicorrelatedModel, HurdlePolicy, Model, RegimeModel, StudentTModel,
    SymmetricNormalModel, Validated,
};

const HORIZON: u64 = 1_000_000;

fn random_case(regime: usize, rng: &mut ChaCha8Rng) -> (Validated<RegimeModel>, HurdlePolicy) {
    let mu = -rng.random_range(0.2..1.5);
    let sigma = rng.random_range(0.5..2.0);
    let z = sigma * rng.random_range(-0.5..1.5);
    let model = match regime {
        0 => RegimeModel::Symmetric(SymmetricNormalModel::new(mu, sigma, rng.random_range(-0.9..0.9))),
        1 => RegimeModel::Asymmetric(AsymmetricNormalModel {
            mu_u: mu,
            mu_v: -rng.random_range(0.2..1.5),
            sigma_u: sigma,
            sigma_v: rng.random_range(0.5..2.0),
            rho: rng.random_range(-0.9..0.9),
            p_u: rng.random_range(0.1..0.9),
        }),
        2 => {
            let n = rng.random_range(2..=6usize);
            let floor = -1.0 / (n as f64 - 1.0);
            let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..1.0)).collect();
            let total: f64 = weights.iter().sum();
            RegimeModel::Multi(EquicorrelatedModel {
                n,
                mu,
                sigma,
                rho: rng.random_range(floor + 0.05..0.9),
                priority_probs: weights.iter().map(|w| w / total).collect(),
            })
        }
        _ => RegimeModel::StudentT(StudentTModel::new(
            mu,
            sigma,
            rng.random_range(-0.9..0.9),
            rng.random_range(3.0..30.0),
        )),
    };
    let policy = if regime == 1 {
        HurdlePolicy::PerDimension {
            z_u: z,
            z_v: sigma * rng.random_range(-0.5..1.5),
        }
    } else {
        HurdlePolicy::Common(z)
    };
    (model.validate().unwrap(), policy)
}

fn suite(regime: usize) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(1000 + regime as u64);
    let cases: Vec<_> = (0..20).map(|_| random_case(regime, &mut rng)).collect();
    cases
        .into_par_iter()
        .enumerate()
        .filter(|(i, (model, policy))| {
            let cfg = SimulationConfig::new(model.clone(), *policy, HORIZON, 77 + *i as u64);
            let r = run(&cfg).unwrap();
            let exact = performance(model, *policy).unwrap().value;
            (r.mean_per_period - exact).abs() <= 3.0 * r.std_error
        })
        .count()
}

#[test]
fn symmetric_suite_agrees() {
    let hits = suite(0);
    assert!(hits >= 19, "{hits}/20 within 3 SE");
}

#[test]
fn asymmetric_suite_agrees() {
    let hits = suite(1);
    assert!(hits >= 19, "{hits}/20 within 3 SE");
}

#[test]
fn equicorrelated_suite_agrees() {
    let hits = suite(2);
    assert!(hits >= 19, "{hits}/20 within 3 SE");
}

#[test]
fn student_t_suite_agrees() {
    let hits = suite(3);
    assert!(hits >= 19, "{hits}/20 within 3 SE");
}

#[test]
fn batch_replications_cover_the_closed_form() {
    let model: Validated<RegimeModel> = SymmetricNormalModel::new(-1.0, 1.0, 0.0).validate().unwrap().into();
    let policy = HurdlePolicy::Common(0.0);
    let exact = performance(&model, policy).unwrap().value;
    let cfg = SimulationConfig::new(model, policy, 200_000, 31).with_batch(32);
    let r = run(&cfg).unwrap();
    let inside = r
        .replications
        .iter()
        .filter(|rep| (rep.mean_per_period - exact).abs() <= 2.0 * rep.std_error)
        .count();
    assert!(inside >= 28, "{inside}/32 within 2 SE");
    assert!((r.mean_per_period - exact).abs() <= 3.0 * r.std_error);
}

#[test]
fn running_mean_converges() {
    let model: Validated<RegimeModel> = SymmetricNormalModel::new(-1.0, 1.0, 0.0).validate().unwrap().into();
    let exact = performance(&model, HurdlePolicy::Common(0.0)).unwrap().value;
    let cfg = SimulationConfig::new(model, HurdlePolicy::Common(0.0), HORIZON, 12);
    let report = convergence_report(&cfg, &[1_000, 10_000, 100_000, 1_000_000]).unwrap();
    for w in report.windows(2) {
        let ratio = w[0].std_error / w[1].std_error;
        assert!((ratio / 10f64.sqrt() - 1.0).abs() < 0.3, "SE ratio {ratio}");
    }
    let last = report.last().unwrap();
    assert!((last.mean_per_period - exact).abs() <= 3.0 * last.std_error);
}
