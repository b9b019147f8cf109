//! Seesaw region tests and optimal hurdle rates for each regime.

use serde::Serialize;

use crate::closed_form::{
    f_student_t, f_symmetric, g_asymmetric, g_asymmetric_terms, h_multi, PerformanceValue,
};
use crate::error::{Error, Result};
use crate::kernels::{normal, student_t};
use crate::models::{
    AsymmetricNormalModel, EquicorrelatedModel, HurdlePolicy, Regime, RegimeModel, StudentTModel,
    SymmetricNormalModel, Validated,
};
use crate::optimize::{numeric_argmax, numeric_argmax_separable};

/// Whether the sufficient condition for net-negative performance at a zero
/// hurdle holds, alongside the actual sign of that performance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeesawVerdict {
    /// Correlations strictly below this value satisfy the sufficient condition.
    pub rho_threshold: f64,
    pub rho: f64,
    pub predicted: bool,
    pub performance_at_zero: PerformanceValue,
    /// The condition is sufficient only, so this can be true while `predicted` is false.
    pub negative_at_zero: bool,
    /// Asymmetric regime: the bound from each priority dimension, (u, v).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dimension_thresholds: Option<[f64; 2]>,
}

impl SeesawVerdict {
    fn new(rho_threshold: f64, rho: f64, admissible_floor: f64, at_zero: PerformanceValue) -> Self {
        SeesawVerdict {
            rho_threshold,
            rho,
            predicted: rho >= admissible_floor && rho < rho_threshold,
            performance_at_zero: at_zero,
            negative_at_zero: at_zero.value < 0.0,
            dimension_thresholds: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalHurdle {
    pub z_star: HurdlePolicy,
    pub performance_at_optimum: PerformanceValue,
    pub regime: Regime,
}

pub fn seesaw_check_symmetric(model: &Validated<SymmetricNormalModel>) -> SeesawVerdict {
    let alpha = -model.mu / model.sigma;
    let threshold = 2.0 * normal::k(alpha) - 1.0;
    SeesawVerdict::new(threshold, model.rho, -1.0, f_symmetric(model, 0.0))
}

pub fn seesaw_check_asymmetric(model: &Validated<AsymmetricNormalModel>) -> Result<SeesawVerdict> {
    let m = &**model;
    for (name, mu) in [("mu_u", m.mu_u), ("mu_v", m.mu_v)] {
        if mu == 0.0 {
            return Err(Error::Domain {
                name,
                value: mu,
                requirement: "a nonzero mean (the bound divides by it)",
            });
        }
    }
    let bound = |mu_a: f64, sigma_a: f64, mu_b: f64, sigma_b: f64| {
        (normal::k(-mu_a / sigma_a) * (1.0 + mu_b / mu_a) - 1.0) * sigma_a / sigma_b
    };
    let rho_u = bound(m.mu_u, m.sigma_u, m.mu_v, m.sigma_v);
    let rho_v = bound(m.mu_v, m.sigma_v, m.mu_u, m.sigma_u);
    let mut verdict = SeesawVerdict::new(rho_u.min(rho_v), m.rho, -1.0, g_asymmetric(model, 0.0, 0.0));
    verdict.dimension_thresholds = Some([rho_u, rho_v]);
    Ok(verdict)
}

pub fn seesaw_check_multi(model: &Validated<EquicorrelatedModel>) -> SeesawVerdict {
    let n = model.n as f64;
    let alpha = -model.mu / model.sigma;
    let threshold = n / (n - 1.0) * normal::k(alpha) - 1.0 / (n - 1.0);
    SeesawVerdict::new(threshold, model.rho, model.min_rho(), h_multi(model, 0.0))
}

pub fn seesaw_check_student_t(model: &Validated<StudentTModel>) -> SeesawVerdict {
    let threshold = t_threshold(-model.mu / model.sigma, model.delta);
    SeesawVerdict::new(threshold, model.rho, -1.0, f_student_t(model, 0.0))
}

/// Largest correlation admitting seesaw under normal effects, 2α·M(α) − 1.
pub fn normal_threshold(alpha: f64) -> Result<f64> {
    normal::k_fn(alpha).map(|k| 2.0 * k - 1.0)
}

/// Its t analogue 2α·W(α) − 1, with W defined for δ > 2.
pub fn student_t_threshold(alpha: f64, delta: f64) -> Result<f64> {
    student_t::w_fn(alpha, delta)?;
    Ok(t_threshold(alpha, delta))
}

fn t_threshold(alpha: f64, delta: f64) -> f64 {
    2.0 * alpha * student_t::w(alpha, delta) - 1.0
}

pub fn seesaw_check(model: &Validated<RegimeModel>) -> Result<SeesawVerdict> {
    match &**model {
        RegimeModel::Symmetric(m) => Ok(seesaw_check_symmetric(&Validated::trusted(*m))),
        RegimeModel::Asymmetric(m) => seesaw_check_asymmetric(&Validated::trusted(*m)),
        RegimeModel::Multi(m) => Ok(seesaw_check_multi(&Validated::trusted(m.clone()))),
        RegimeModel::StudentT(m) => Ok(seesaw_check_student_t(&Validated::trusted(*m))),
    }
}

fn open_unit_interval(rho: f64) -> Result<()> {
    if rho > -1.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(Error::Hypothesis(format!(
            "rho = {rho} must lie in the open interval (-1, 1) for an interior optimal hurdle"
        )))
    }
}

fn two_dim_hurdle(mu: f64, rho: f64) -> f64 {
    (rho - 1.0) / (rho + 1.0) * mu
}

pub fn optimal_hurdle_symmetric(model: &Validated<SymmetricNormalModel>) -> Result<OptimalHurdle> {
    open_unit_interval(model.rho)?;
    let z = two_dim_hurdle(model.mu, model.rho);
    Ok(OptimalHurdle {
        z_star: HurdlePolicy::Common(z),
        performance_at_optimum: f_symmetric(model, z),
        regime: Regime::Symmetric,
    })
}

/// The admissible correlation range for interior per-dimension optima,
/// as `(lower, upper)`, exclusive at both ends.
pub fn asymmetric_hurdle_range(model: &AsymmetricNormalModel) -> (f64, f64) {
    let lower = -(model.sigma_v / model.sigma_u).min(model.sigma_u / model.sigma_v);
    let ratio = (model.mu_v / model.sigma_v) / (model.mu_u / model.sigma_u);
    (lower, ratio.min(1.0 / ratio))
}

pub fn optimal_hurdle_asymmetric(model: &Validated<AsymmetricNormalModel>) -> Result<OptimalHurdle> {
    let m = &**model;
    let (lower, upper) = asymmetric_hurdle_range(m);
    if !(m.rho > lower) {
        return Err(Error::Hypothesis(format!(
            "rho = {} must exceed -min(sigma_v/sigma_u, sigma_u/sigma_v) = {lower}",
            m.rho
        )));
    }
    if !(m.rho < upper) {
        return Err(Error::Hypothesis(format!(
            "rho = {} must be below min of the signal-to-noise ratios (mu_v/sigma_v)/(mu_u/sigma_u) and its inverse = {upper}",
            m.rho
        )));
    }
    let (su, sv) = (m.sigma_u, m.sigma_v);
    let z_u = (m.rho * m.mu_u / su - m.mu_v / sv) / (m.rho / su + 1.0 / sv);
    let z_v = (m.rho * m.mu_v / sv - m.mu_u / su) / (m.rho / sv + 1.0 / su);
    Ok(OptimalHurdle {
        z_star: HurdlePolicy::PerDimension { z_u, z_v },
        performance_at_optimum: g_asymmetric(model, z_u, z_v),
        regime: Regime::Asymmetric,
    })
}

pub fn optimal_hurdle_multi(model: &Validated<EquicorrelatedModel>) -> Result<OptimalHurdle> {
    let floor = model.min_rho();
    if !(model.rho > floor && model.rho < 1.0) {
        return Err(Error::Hypothesis(format!(
            "rho = {} must lie in the open interval (-1/(n-1), 1) = ({floor}, 1)",
            model.rho
        )));
    }
    let k = model.n as f64 - 1.0;
    let z = k * (model.rho - 1.0) * model.mu / (k * model.rho + 1.0);
    Ok(OptimalHurdle {
        z_star: HurdlePolicy::Common(z),
        performance_at_optimum: h_multi(model, z),
        regime: Regime::Multi,
    })
}

/// Same location as the normal case; heavier tails change only the value.
pub fn optimal_hurdle_student_t(model: &Validated<StudentTModel>) -> Result<OptimalHurdle> {
    open_unit_interval(model.rho)?;
    let z = two_dim_hurdle(model.mu, model.rho);
    Ok(OptimalHurdle {
        z_star: HurdlePolicy::Common(z),
        performance_at_optimum: f_student_t(model, z),
        regime: Regime::StudentT,
    })
}

pub fn optimal_hurdle(model: &Validated<RegimeModel>) -> Result<OptimalHurdle> {
    match &**model {
        RegimeModel::Symmetric(m) => optimal_hurdle_symmetric(&Validated::trusted(*m)),
        RegimeModel::Asymmetric(m) => optimal_hurdle_asymmetric(&Validated::trusted(*m)),
        RegimeModel::Multi(m) => optimal_hurdle_multi(&Validated::trusted(m.clone())),
        RegimeModel::StudentT(m) => optimal_hurdle_student_t(&Validated::trusted(*m)),
    }
}

/// Search interval `[0, 10·z + 10·scale]` around a closed-form optimum `z`.
pub fn search_bracket(z: f64, scale: f64) -> (f64, f64) {
    (0.0, 10.0 * z + 10.0 * scale)
}

/// Closed-form optimum next to an independent numerical maximization of
/// the same performance function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossCheck {
    pub closed_form: HurdlePolicy,
    pub numeric: HurdlePolicy,
    pub max_abs_difference: f64,
}

pub fn cross_check(model: &Validated<RegimeModel>) -> Result<CrossCheck> {
    let optimum = optimal_hurdle(model)?;
    let (numeric, diff) = match (&**model, optimum.z_star) {
        (RegimeModel::Asymmetric(m), HurdlePolicy::PerDimension { z_u, z_v }) => {
            let v = Validated::trusted(*m);
            // The cross partial of g vanishes, so each hurdle is searched on its own term.
            let best = numeric_argmax_separable(
                |a| g_asymmetric_terms(&v, a, z_v)[0],
                |b| g_asymmetric_terms(&v, z_u, b)[1],
                search_bracket(z_u, m.sigma_u),
                search_bracket(z_v, m.sigma_v),
            )?;
            let [a, b] = best.location;
            (
                HurdlePolicy::PerDimension { z_u: a, z_v: b },
                (a - z_u).abs().max((b - z_v).abs()),
            )
        }
        (other, HurdlePolicy::Common(z)) => {
            let (lo, hi) = search_bracket(z, dispersion(other));
            let best = match other {
                RegimeModel::Symmetric(m) => {
                    let v = Validated::trusted(*m);
                    numeric_argmax(|s| f_symmetric(&v, s).value, lo, hi)?
                }
                RegimeModel::Multi(m) => {
                    let v = Validated::trusted(m.clone());
                    numeric_argmax(|s| h_multi(&v, s).value, lo, hi)?
                }
                RegimeModel::StudentT(m) => {
                    let v = Validated::trusted(*m);
                    numeric_argmax(|s| f_student_t(&v, s).value, lo, hi)?
                }
                RegimeModel::Asymmetric(_) => unreachable!("asymmetric optimum is per dimension"),
            };
            (HurdlePolicy::Common(best.location), (best.location - z).abs())
        }
        (_, HurdlePolicy::PerDimension { .. }) => unreachable!("only the asymmetric optimum is per dimension"),
    };
    Ok(CrossCheck {
        closed_form: optimum.z_star,
        numeric,
        max_abs_difference: diff,
    })
}

fn dispersion(model: &RegimeModel) -> f64 {
    match model {
        RegimeModel::Symmetric(m) => m.sigma,
        RegimeModel::Asymmetric(m) => m.sigma_u.max(m.sigma_v),
        RegimeModel::Multi(m) => m.sigma,
        RegimeModel::StudentT(m) => m.sigma,
    }
}
