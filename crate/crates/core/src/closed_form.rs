//! Closed-form long-run average performance E[D·(sum of effects)] per period.
//!
//! Every evaluator accepts any hurdle, including ±∞: the tails go through
//! `erfc` and the incomplete beta function, so the limits come out as 0
//! (nothing adopted) and the sum of the means (everything adopted).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{normal, student_t};
use crate::models::{
    AsymmetricNormalModel, EquicorrelatedModel, HurdlePolicy, Regime, RegimeModel, StudentTModel,
    SymmetricNormalModel, Validated,
};

/// Expected overall performance per period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerformanceValue {
    pub value: f64,
    pub regime: Regime,
}

/// Two dimensions with common mean, standard deviation and correlation.
pub fn f_symmetric(model: &Validated<SymmetricNormalModel>, z: f64) -> PerformanceValue {
    let a = (z - model.mu) / model.sigma;
    let value = 2.0 * model.mu * normal::sf(a) + model.sigma * (1.0 + model.rho) * normal::pdf(a);
    PerformanceValue {
        value,
        regime: Regime::Symmetric,
    }
}

/// General bivariate normal with separate hurdles for the two priorities.
pub fn g_asymmetric(model: &Validated<AsymmetricNormalModel>, z_u: f64, z_v: f64) -> PerformanceValue {
    let [when_u, when_v] = g_asymmetric_terms(model, z_u, z_v);
    PerformanceValue {
        value: when_u + when_v,
        regime: Regime::Asymmetric,
    }
}

/// The two priority-weighted terms of [`g_asymmetric`]; the first depends
/// on `z_u` only and the second on `z_v` only.
pub fn g_asymmetric_terms(model: &Validated<AsymmetricNormalModel>, z_u: f64, z_v: f64) -> [f64; 2] {
    let m = &**model;
    let mean_sum = m.mu_u + m.mu_v;
    let a_u = (z_u - m.mu_u) / m.sigma_u;
    let a_v = (z_v - m.mu_v) / m.sigma_v;
    let when_u = mean_sum * normal::sf(a_u) + (m.sigma_u + m.rho * m.sigma_v) * normal::pdf(a_u);
    let when_v = mean_sum * normal::sf(a_v) + (m.rho * m.sigma_u + m.sigma_v) * normal::pdf(a_v);
    [m.p_u * when_u, (1.0 - m.p_u) * when_v]
}

/// n equicorrelated dimensions sharing one hurdle. Independent of the
/// priority probabilities.
pub fn h_multi(model: &Validated<EquicorrelatedModel>, z: f64) -> PerformanceValue {
    let n = model.n as f64;
    let a = (z - model.mu) / model.sigma;
    let spill = model.sigma * (1.0 + (n - 1.0) * model.rho);
    PerformanceValue {
        value: n * model.mu * normal::sf(a) + spill * normal::pdf(a),
        regime: Regime::Multi,
    }
}

/// Symmetric bivariate t with scale σ and δ degrees of freedom.
pub fn f_student_t(model: &Validated<StudentTModel>, z: f64) -> PerformanceValue {
    let delta = model.delta;
    let a = (z - model.mu) / model.sigma;
    let inflation = delta / (delta - 2.0);
    let density = student_t::ln_pdf_centered(a, inflation, delta - 2.0).exp();
    let value = 2.0 * model.mu * student_t::std_sf(a, delta)
        + model.sigma * (1.0 + model.rho) * inflation * density;
    PerformanceValue {
        value,
        regime: Regime::StudentT,
    }
}

/// Expected spillover E[−V | U = u] onto the unmeasured dimension.
pub fn externality_line(model: &Validated<SymmetricNormalModel>, u: f64) -> f64 {
    -model.rho * u - (1.0 - model.rho) * model.mu
}

/// Dispatch on regime and hurdle policy.
pub fn performance(model: &Validated<RegimeModel>, policy: HurdlePolicy) -> Result<PerformanceValue> {
    let regime = model.regime();
    match (&**model, policy) {
        (RegimeModel::Symmetric(m), HurdlePolicy::Common(z)) => Ok(f_symmetric(&Validated::trusted(*m), z)),
        (RegimeModel::Symmetric(m), HurdlePolicy::PerDimension { z_u, z_v }) => {
            let embedded = Validated::trusted(m.to_asymmetric());
            Ok(PerformanceValue {
                regime,
                ..g_asymmetric(&embedded, z_u, z_v)
            })
        }
        (RegimeModel::Asymmetric(m), HurdlePolicy::Common(z)) => Ok(g_asymmetric(&Validated::trusted(*m), z, z)),
        (RegimeModel::Asymmetric(m), HurdlePolicy::PerDimension { z_u, z_v }) => {
            Ok(g_asymmetric(&Validated::trusted(*m), z_u, z_v))
        }
        (RegimeModel::Multi(m), HurdlePolicy::Common(z)) => Ok(h_multi(&Validated::trusted(m.clone()), z)),
        (RegimeModel::StudentT(m), HurdlePolicy::Common(z)) => Ok(f_student_t(&Validated::trusted(*m), z)),
        (_, HurdlePolicy::PerDimension { .. }) => Err(Error::Policy {
            regime: regime.as_str(),
            reason: "closed form exists for a common hurdle only",
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::t_pdf;
    use crate::models::{Model, ValidationMode};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use seesaw_testkit::quad::integrate;

    fn sym(mu: f64, sigma: f64, rho: f64) -> Validated<SymmetricNormalModel> {
        SymmetricNormalModel::new(mu, sigma, rho).validate().unwrap()
    }

    /// E[(U + V)·1{U > z}] with E[V | U = u] = μ + ρ(u − μ), by quadrature
    /// against the marginal density of U over the half-line mapped onto [0, 1).
    fn by_quadrature(mu: f64, sigma: f64, rho: f64, z: f64, density: impl Fn(f64) -> f64) -> f64 {
        integrate(
            |s| {
                let u = z + sigma * s / (1.0 - s);
                let jacobian = sigma / ((1.0 - s) * (1.0 - s));
                (u + mu + rho * (u - mu)) * density(u) * jacobian
            },
            0.0,
            1.0 - 1e-12,
            1e-13,
        )
    }

    #[test]
    fn symmetric_examples() {
        let m = sym(-1.0, 1.0, 0.0);
        // 40-digit reference values.
        assert_relative_eq!(f_symmetric(&m, 0.0).value, -0.075_339_783_343_770_753, max_relative = 1e-13);
        assert_relative_eq!(f_symmetric(&m, 1.0).value, 0.008_490_702_616_829_637_5, max_relative = 1e-12);
        assert!(f_symmetric(&m, -1.0 + 50.0).value.abs() < 1e-300);
        assert_eq!(f_symmetric(&m, f64::INFINITY).value, 0.0);
        assert_eq!(f_symmetric(&m, f64::NEG_INFINITY).value, -2.0);
    }

    #[test]
    fn symmetric_matches_conditional_expectation_integral() {
        for &(mu, sigma, rho, z) in &[(-1.0, 1.0, 0.0, 0.0), (-0.3, 2.0, -0.6, 0.7), (-2.0, 0.5, 0.8, -1.0)] {
            let m = sym(mu, sigma, rho);
            let oracle = by_quadrature(mu, sigma, rho, z, |u| normal::pdf((u - mu) / sigma) / sigma);
            assert!((f_symmetric(&m, z).value - oracle).abs() < 1e-11, "{mu} {sigma} {rho} {z}");
        }
    }

    #[test]
    fn asymmetric_examples() {
        let m = AsymmetricNormalModel {
            mu_u: -1.0,
            mu_v: -2.0,
            sigma_u: 1.0,
            sigma_v: 2.0,
            rho: 0.0,
            p_u: 0.5,
        };
        let v = m.validate().unwrap();
        assert_relative_eq!(g_asymmetric(&v, 0.0, 0.0).value, -0.113_009_675_015_656_13, max_relative = 1e-13);

        let only_u = AsymmetricNormalModel { p_u: 1.0, ..m }.validate().unwrap();
        let a = 1.0;
        let expected = -3.0 * normal::sf(a) + 1.0 * normal::pdf(a);
        assert_relative_eq!(g_asymmetric(&only_u, 0.0, -1e300).value, expected, max_relative = 1e-15);
        assert_eq!(g_asymmetric(&only_u, 0.0, f64::NEG_INFINITY).value, expected);
    }

    #[test]
    fn multi_examples() {
        let m = EquicorrelatedModel::uniform(3, -1.0, 1.0, 0.0).validate().unwrap();
        assert_relative_eq!(h_multi(&m, 0.0).value, -0.233_995_037_275_227_80, max_relative = 1e-13);
        let floor = EquicorrelatedModel::uniform(4, -1.0, 1.5, -1.0 / 3.0).validate().unwrap();
        for &z in &[-3.0, 0.0, 0.4, 5.0] {
            let v = h_multi(&floor, z).value;
            assert!(v < 0.0);
            assert_relative_eq!(v, -4.0 * normal::sf((z + 1.0) / 1.5), max_relative = 1e-14);
        }
    }

    #[test]
    fn student_t_examples() {
        let m = StudentTModel::new(-1.0, 1.0, 0.0, 5.0).validate().unwrap();
        assert_relative_eq!(f_student_t(&m, 0.0).value, -0.033_697_771_622_651_765, max_relative = 1e-12);
        assert_relative_eq!(f_student_t(&m, 1.0).value, 0.044_513_719_404_128_693, max_relative = 1e-12);
        assert!(f_student_t(&m, -1.0 + 50.0).value.abs() < 1e-3);
        assert_eq!(f_student_t(&m, f64::INFINITY).value, 0.0);
        assert_relative_eq!(f_student_t(&m, f64::NEG_INFINITY).value, -2.0, max_relative = 1e-15);
    }

    #[test]
    fn student_t_matches_conditional_expectation_integral() {
        // Elliptical distributions keep E[V | U = u] linear in u.
        let cases = [(-1.0, 1.0, 0.0, 5.0, 0.0), (-0.5, 2.0, 0.4, 3.5, 1.0), (-1.5, 0.7, -0.7, 12.0, 0.2)];
        for &(mu, sigma, rho, delta, z) in &cases {
            let m = StudentTModel::new(mu, sigma, rho, delta).validate().unwrap();
            let oracle = by_quadrature(mu, sigma, rho, z, |u| t_pdf(u, mu, sigma * sigma, delta).unwrap());
            let got = f_student_t(&m, z).value;
            assert!((got - oracle).abs() < 1e-9, "{got} vs {oracle}");
        }
    }

    #[test]
    fn student_t_approaches_normal() {
        let n = sym(-0.8, 1.3, 0.2);
        let mut previous = f64::INFINITY;
        for &delta in &[1e2, 1e4, 1e6] {
            let t = StudentTModel::new(-0.8, 1.3, 0.2, delta).validate().unwrap();
            let gap = (0..=20)
                .map(|i| -2.0 + 0.25 * f64::from(i))
                .map(|z| (f_student_t(&t, z).value - f_symmetric(&n, z).value).abs())
                .fold(0.0, f64::max);
            assert!(gap < previous);
            previous = gap;
        }
        assert!(previous < 1e-4);
    }

    #[test]
    fn externality_examples() {
        let flat = sym(-1.0, 1.0, 0.0);
        for &u in &[-3.0, 0.0, 2.5] {
            assert_eq!(externality_line(&flat, u), 1.0);
        }
        for &rho in &[-0.7, -0.2, 0.3, 0.9] {
            let m = sym(-1.3, 1.0, rho);
            let z_star = (rho - 1.0) / (rho + 1.0) * -1.3;
            assert_relative_eq!(externality_line(&m, z_star), z_star, max_relative = 1e-14);
        }
        let perfect = sym(-1.0, 1.0, 1.0);
        assert_eq!(externality_line(&perfect, 2.0), -2.0);
    }

    #[test]
    fn dispatch_matches_direct_calls() {
        let m: Validated<RegimeModel> = sym(-1.0, 1.0, 0.2).into();
        let direct = f_symmetric(&sym(-1.0, 1.0, 0.2), 0.5).value;
        assert_eq!(performance(&m, HurdlePolicy::Common(0.5)).unwrap().value, direct);
        let split = performance(&m, HurdlePolicy::PerDimension { z_u: 0.5, z_v: 0.5 }).unwrap();
        assert_relative_eq!(split.value, direct, max_relative = 1e-12);
        let multi: Validated<RegimeModel> = EquicorrelatedModel::uniform(3, -1.0, 1.0, 0.0).validate().unwrap().into();
        assert!(performance(&multi, HurdlePolicy::PerDimension { z_u: 0.0, z_v: 0.0 }).is_err());
    }

    proptest! {
        #[test]
        fn symmetric_is_the_diagonal_of_asymmetric(
            mu in -3.0f64..-0.01, sigma in 0.1f64..4.0, rho in -1.0f64..=1.0, p_u in 0.0f64..=1.0, z in -5.0f64..8.0,
        ) {
            let s = SymmetricNormalModel::new(mu, sigma, rho).with_priority(p_u).validate().unwrap();
            let a = s.to_asymmetric().validate().unwrap();
            let lhs = f_symmetric(&s, z).value;
            let rhs = g_asymmetric(&a, z, z).value;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        }

        #[test]
        fn two_dimensional_multi_is_symmetric(
            mu in -3.0f64..-0.01, sigma in 0.1f64..4.0, rho in -1.0f64..=1.0, z in -5.0f64..8.0,
        ) {
            let s = SymmetricNormalModel::new(mu, sigma, rho).validate().unwrap();
            let m = EquicorrelatedModel::uniform(2, mu, sigma, rho).validate().unwrap();
            let lhs = f_symmetric(&s, z).value;
            let rhs = h_multi(&m, z).value;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        }

        #[test]
        fn evaluators_are_finite_with_sound_limits(
            mu in -3.0f64..-0.01, sigma in 0.1f64..4.0, rho in -1.0f64..=1.0, delta in 2.05f64..50.0, z in -1e6f64..1e6,
        ) {
            let s = SymmetricNormalModel::new(mu, sigma, rho).validate().unwrap();
            let t = StudentTModel::new(mu, sigma, rho, delta).validate().unwrap();
            prop_assert!(f_symmetric(&s, z).value.is_finite());
            prop_assert!(f_student_t(&t, z).value.is_finite());
            prop_assert_eq!(f_symmetric(&s, f64::NEG_INFINITY).value, 2.0 * mu);
            prop_assert!((f_student_t(&t, f64::NEG_INFINITY).value - 2.0 * mu).abs() <= 1e-14 * mu.abs());
        }

        #[test]
        fn relaxed_models_evaluate_too(mu_u in 0.0f64..1.0, gap in 0.01f64..2.0, rho in -1.0f64..=1.0) {
            let m = AsymmetricNormalModel { mu_u, mu_v: -mu_u - gap, sigma_u: 1.0, sigma_v: 1.0, rho, p_u: 0.5 };
            let v = m.validate_with(ValidationMode::Relaxed).unwrap();
            prop_assert!(g_asymmetric(&v, 0.0, 0.0).value.is_finite());
        }
    }
}
