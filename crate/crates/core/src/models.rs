//! Parameterizations of the four effect distributions and the hurdle policy.
//!
//! Raw parameter bundles are plain structs with public fields. Evaluators
//! take a [`Validated`] wrapper, which can only be obtained through
//! [`Model::validate`], so every downstream computation sees parameters that
//! satisfy the modelling assumptions.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which of the four distributional families a model belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "sym")]
    Symmetric,
    #[serde(rename = "asym")]
    Asymmetric,
    #[serde(rename = "multi")]
    Multi,
    #[serde(rename = "t")]
    StudentT,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Symmetric => "sym",
            Regime::Asymmetric => "asym",
            Regime::Multi => "multi",
            Regime::StudentT => "t",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The modelling assumption a violated bound belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Assumption {
    /// Every mean effect is negative.
    NegativeMeans,
    /// Relaxed form: the mean effects sum to a negative number.
    NegativeMeanSum,
    /// Standard deviations (or t scales) are positive.
    PositiveDispersion,
    /// Correlation lies in [−1, 1].
    CorrelationRange,
    /// Equicorrelated covariance is positive semidefinite: ρ ≥ −1/(n−1).
    PositiveSemidefinite,
    /// Priority probabilities form a distribution over the dimensions.
    PriorityDistribution,
    /// At least two performance dimensions.
    DimensionCount,
    /// Student-t degrees of freedom exceed 2, so variances exist.
    FiniteVariance,
}

impl Assumption {
    pub fn describe(self) -> &'static str {
        match self {
            Assumption::NegativeMeans => "mean effects must be negative",
            Assumption::NegativeMeanSum => "mean effects must sum to a negative value",
            Assumption::PositiveDispersion => "dispersion must be positive",
            Assumption::CorrelationRange => "correlation must lie in [-1, 1]",
            Assumption::PositiveSemidefinite => {
                "equicorrelated covariance must be positive semidefinite"
            }
            Assumption::PriorityDistribution => "priority probabilities must form a distribution",
            Assumption::DimensionCount => "at least two performance dimensions are required",
            Assumption::FiniteVariance => "t degrees of freedom must exceed 2",
        }
    }
}

/// One violated bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub field: &'static str,
    pub value: f64,
    pub bound: String,
    pub assumption: Assumption,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.value.is_nan() {
            write!(f, "{} is missing or not a number: requires {}", self.field, self.bound)?;
        } else {
            write!(f, "{} = {}: requires {}", self.field, self.value, self.bound)?;
        }
        write!(f, " ({})", self.assumption.describe())
    }
}

/// Every violated bound of a parameter bundle, never a partial list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub regime: Regime,
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid {} model:", self.regime)?;
        for v in &self.violations {
            write!(f, "\n  - {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

/// Strict mode requires every mean to be negative. Relaxed mode only asks
/// that the means sum to a negative number, which still admits seesaw
/// behaviour when one dimension has a non-negative mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidationMode {
    #[default]
    Strict,
    Relaxed,
}

/// A model whose parameters have passed validation.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Validated<M> {
    model: M,
}

impl<M> Validated<M> {
    /// For parts of a model that has already passed validation.
    pub(crate) fn trusted(model: M) -> Self {
        Validated { model }
    }

    pub fn into_inner(self) -> M {
        self.model
    }
}

impl<M> Deref for Validated<M> {
    type Target = M;

    fn deref(&self) -> &M {
        &self.model
    }
}

pub trait Model: Sized {
    const REGIME: Regime;

    /// All violated bounds under `mode`; empty when the bundle is valid.
    fn violations(&self, mode: ValidationMode) -> Vec<Violation>;

    fn validate_with(self, mode: ValidationMode) -> Result<Validated<Self>, ValidationReport> {
        let violations = self.violations(mode);
        if violations.is_empty() {
            Ok(Validated { model: self })
        } else {
            Err(ValidationReport {
                regime: Self::REGIME,
                violations,
            })
        }
    }

    fn validate(self) -> Result<Validated<Self>, ValidationReport> {
        self.validate_with(ValidationMode::Strict)
    }
}

struct Checks(Vec<Violation>);

impl Checks {
    fn new() -> Self {
        Checks(Vec::new())
    }

    fn require(&mut self, ok: bool, field: &'static str, value: f64, bound: impl Into<String>, assumption: Assumption) {
        if !ok {
            self.0.push(Violation {
                field,
                value,
                bound: bound.into(),
                assumption,
            });
        }
    }

    fn negative(&mut self, field: &'static str, value: f64) {
        self.require(value < 0.0, field, value, format!("{field} < 0"), Assumption::NegativeMeans);
    }

    fn finite(&mut self, field: &'static str, value: f64, assumption: Assumption) {
        self.require(value.is_finite(), field, value, format!("{field} finite"), assumption);
    }

    fn positive(&mut self, field: &'static str, value: f64) {
        self.require(
            value > 0.0 && value.is_finite(),
            field,
            value,
            format!("{field} > 0"),
            Assumption::PositiveDispersion,
        );
    }

    fn correlation(&mut self, value: f64) {
        self.require(
            (-1.0..=1.0).contains(&value),
            "rho",
            value,
            "-1 <= rho <= 1",
            Assumption::CorrelationRange,
        );
    }

    fn probability(&mut self, field: &'static str, value: f64) {
        self.require(
            (0.0..=1.0).contains(&value),
            field,
            value,
            format!("0 <= {field} <= 1"),
            Assumption::PriorityDistribution,
        );
    }
}

fn default_p_u() -> f64 {
    0.5
}

/// Two dimensions sharing mean, standard deviation and correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricNormalModel {
    pub mu: f64,
    pub sigma: f64,
    pub rho: f64,
    /// Probability that dimension u is the priority; irrelevant to the
    /// long-run performance under symmetry.
    #[serde(default = "default_p_u")]
    pub p_u: f64,
}

impl SymmetricNormalModel {
    pub fn new(mu: f64, sigma: f64, rho: f64) -> Self {
        SymmetricNormalModel {
            mu,
            sigma,
            rho,
            p_u: default_p_u(),
        }
    }

    pub fn with_priority(mut self, p_u: f64) -> Self {
        self.p_u = p_u;
        self
    }

    /// ρ = ±1 needs a rank-one sampler.
    pub fn is_degenerate(&self) -> bool {
        self.rho.abs() == 1.0
    }

    /// The same distribution written as a general bivariate normal.
    pub fn to_asymmetric(&self) -> AsymmetricNormalModel {
        AsymmetricNormalModel {
            mu_u: self.mu,
            mu_v: self.mu,
            sigma_u: self.sigma,
            sigma_v: self.sigma,
            rho: self.rho,
            p_u: self.p_u,
        }
    }
}

impl Model for SymmetricNormalModel {
    const REGIME: Regime = Regime::Symmetric;

    fn violations(&self, _mode: ValidationMode) -> Vec<Violation> {
        // With equal means, "sum negative" and "each negative" coincide.
        let mut c = Checks::new();
        c.negative("mu", self.mu);
        c.positive("sigma", self.sigma);
        c.correlation(self.rho);
        c.probability("p_u", self.p_u);
        c.0
    }
}

/// General bivariate normal effects.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymmetricNormalModel {
    pub mu_u: f64,
    pub mu_v: f64,
    pub sigma_u: f64,
    pub sigma_v: f64,
    pub rho: f64,
    #[serde(default = "default_p_u")]
    pub p_u: f64,
}

impl AsymmetricNormalModel {
    pub fn is_degenerate(&self) -> bool {
        self.rho.abs() == 1.0
    }
}

impl Model for AsymmetricNormalModel {
    const REGIME: Regime = Regime::Asymmetric;

    fn violations(&self, mode: ValidationMode) -> Vec<Violation> {
        let mut c = Checks::new();
        match mode {
            ValidationMode::Strict => {
                c.negative("mu_u", self.mu_u);
                c.negative("mu_v", self.mu_v);
            }
            ValidationMode::Relaxed => {
                c.finite("mu_u", self.mu_u, Assumption::NegativeMeanSum);
                c.finite("mu_v", self.mu_v, Assumption::NegativeMeanSum);
                let sum = self.mu_u + self.mu_v;
                if sum.is_finite() {
                    c.require(sum < 0.0, "mu_u + mu_v", sum, "mu_u + mu_v < 0", Assumption::NegativeMeanSum);
                }
            }
        }
        c.positive("sigma_u", self.sigma_u);
        c.positive("sigma_v", self.sigma_v);
        c.correlation(self.rho);
        c.probability("p_u", self.p_u);
        c.0
    }
}

/// n dimensions with common mean, variance and pairwise correlation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquicorrelatedModel {
    pub n: usize,
    pub mu: f64,
    pub sigma: f64,
    pub rho: f64,
    pub priority_probs: Vec<f64>,
}

impl EquicorrelatedModel {
    /// Uniform priorities over the `n` dimensions.
    pub fn uniform(n: usize, mu: f64, sigma: f64, rho: f64) -> Self {
        let p = if n > 0 { 1.0 / n as f64 } else { f64::NAN };
        EquicorrelatedModel {
            n,
            mu,
            sigma,
            rho,
            priority_probs: vec![p; n],
        }
    }

    /// Smallest correlation for which the covariance is positive semidefinite.
    pub fn min_rho(&self) -> f64 {
        -1.0 / (self.n as f64 - 1.0)
    }

    pub fn is_degenerate(&self) -> bool {
        self.rho == 1.0 || self.rho == self.min_rho()
    }
}

impl Model for EquicorrelatedModel {
    const REGIME: Regime = Regime::Multi;

    fn violations(&self, _mode: ValidationMode) -> Vec<Violation> {
        let mut c = Checks::new();
        let n_ok = self.n >= 2;
        c.require(n_ok, "n", self.n as f64, "n >= 2", Assumption::DimensionCount);
        c.negative("mu", self.mu);
        c.positive("sigma", self.sigma);
        if n_ok {
            let lo = self.min_rho();
            c.require(
                self.rho >= lo && self.rho <= 1.0,
                "rho",
                self.rho,
                format!("-1/(n-1) = {lo} <= rho <= 1"),
                Assumption::PositiveSemidefinite,
            );
        }
        c.require(
            self.priority_probs.len() == self.n,
            "priority_probs",
            self.priority_probs.len() as f64,
            format!("exactly n = {} entries", self.n),
            Assumption::PriorityDistribution,
        );
        for &p in &self.priority_probs {
            c.probability("priority_probs[i]", p);
        }
        let total: f64 = self.priority_probs.iter().sum();
        c.require(
            (total - 1.0).abs() <= 1e-9,
            "sum(priority_probs)",
            total,
            "sum(priority_probs) = 1",
            Assumption::PriorityDistribution,
        );
        c.0
    }
}

/// Symmetric bivariate Student t effects with scale matrix σ²·[[1, ρ], [ρ, 1]].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudentTModel {
    pub mu: f64,
    /// Scale of each marginal; the marginal variance is σ²·δ/(δ−2).
    pub sigma: f64,
    pub rho: f64,
    pub delta: f64,
    #[serde(default = "default_p_u")]
    pub p_u: f64,
}

impl StudentTModel {
    pub fn new(mu: f64, sigma: f64, rho: f64, delta: f64) -> Self {
        StudentTModel {
            mu,
            sigma,
            rho,
            delta,
            p_u: default_p_u(),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.rho.abs() == 1.0
    }

    /// The normal model with the same location, scale and correlation.
    pub fn normal_limit(&self) -> SymmetricNormalModel {
        SymmetricNormalModel {
            mu: self.mu,
            sigma: self.sigma,
            rho: self.rho,
            p_u: self.p_u,
        }
    }
}

impl Model for StudentTModel {
    const REGIME: Regime = Regime::StudentT;

    fn violations(&self, _mode: ValidationMode) -> Vec<Violation> {
        let mut c = Checks::new();
        c.negative("mu", self.mu);
        c.positive("sigma", self.sigma);
        c.correlation(self.rho);
        c.require(
            self.delta > 2.0 && self.delta.is_finite(),
            "delta",
            self.delta,
            "delta > 2",
            Assumption::FiniteVariance,
        );
        c.probability("p_u", self.p_u);
        c.0
    }
}

/// Any of the four regimes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum RegimeModel {
    #[serde(rename = "sym")]
    Symmetric(SymmetricNormalModel),
    #[serde(rename = "asym")]
    Asymmetric(AsymmetricNormalModel),
    #[serde(rename = "multi")]
    Multi(EquicorrelatedModel),
    #[serde(rename = "t")]
    StudentT(StudentTModel),
}

impl RegimeModel {
    pub fn regime(&self) -> Regime {
        match self {
            RegimeModel::Symmetric(_) => Regime::Symmetric,
            RegimeModel::Asymmetric(_) => Regime::Asymmetric,
            RegimeModel::Multi(_) => Regime::Multi,
            RegimeModel::StudentT(_) => Regime::StudentT,
        }
    }

    pub fn dimensions(&self) -> usize {
        match self {
            RegimeModel::Multi(m) => m.n,
            _ => 2,
        }
    }
}

impl Model for RegimeModel {
    // Reports carry the concrete regime; see `validate_regime`.
    const REGIME: Regime = Regime::Symmetric;

    fn violations(&self, mode: ValidationMode) -> Vec<Violation> {
        match self {
            RegimeModel::Symmetric(m) => m.violations(mode),
            RegimeModel::Asymmetric(m) => m.violations(mode),
            RegimeModel::Multi(m) => m.violations(mode),
            RegimeModel::StudentT(m) => m.violations(mode),
        }
    }

    fn validate_with(self, mode: ValidationMode) -> Result<Validated<Self>, ValidationReport> {
        let violations = self.violations(mode);
        if violations.is_empty() {
            Ok(Validated { model: self })
        } else {
            Err(ValidationReport {
                regime: self.regime(),
                violations,
            })
        }
    }
}

macro_rules! regime_from {
    ($ty:ty, $variant:ident) => {
        impl From<Validated<$ty>> for Validated<RegimeModel> {
            fn from(v: Validated<$ty>) -> Self {
                Validated {
                    model: RegimeModel::$variant(v.model),
                }
            }
        }
    };
}

regime_from!(SymmetricNormalModel, Symmetric);
regime_from!(AsymmetricNormalModel, Asymmetric);
regime_from!(EquicorrelatedModel, Multi);
regime_from!(StudentTModel, StudentT);

/// Adoption threshold applied to the measured primary-dimension effect.
/// An innovation ships only if its effect strictly exceeds the hurdle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HurdlePolicy {
    /// One hurdle for every dimension.
    Common(f64),
    /// Separate hurdles when u or v is the priority.
    PerDimension { z_u: f64, z_v: f64 },
}

impl Default for HurdlePolicy {
    fn default() -> Self {
        HurdlePolicy::Common(0.0)
    }
}

impl HurdlePolicy {
    pub fn is_finite(&self) -> bool {
        match *self {
            HurdlePolicy::Common(z) => z.is_finite(),
            HurdlePolicy::PerDimension { z_u, z_v } => z_u.is_finite() && z_v.is_finite(),
        }
    }

    /// Per-dimension hurdle vector for a model with `dims` dimensions.
    pub fn hurdles(&self, regime: Regime, dims: usize) -> Result<Vec<f64>> {
        match *self {
            HurdlePolicy::Common(z) => Ok(vec![z; dims]),
            HurdlePolicy::PerDimension { z_u, z_v } if dims == 2 => Ok(vec![z_u, z_v]),
            HurdlePolicy::PerDimension { .. } => Err(Error::Policy {
                regime: regime.as_str(),
                reason: "per-dimension hurdles are only defined for two dimensions",
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn symmetric_examples() {
        assert!(SymmetricNormalModel::new(-1.0, 1.0, 0.0).validate().is_ok());
        let err = SymmetricNormalModel::new(0.5, 1.0, 0.0).validate().unwrap_err();
        assert_eq!(err.violations.len(), 1);
        assert_eq!(err.violations[0].field, "mu");
        assert_eq!(err.violations[0].assumption, Assumption::NegativeMeans);
    }

    #[test]
    fn equicorrelated_psd_bound() {
        let err = EquicorrelatedModel::uniform(4, -1.0, 1.0, -0.5).validate().unwrap_err();
        let v = &err.violations[0];
        assert_eq!(v.assumption, Assumption::PositiveSemidefinite);
        assert!(v.bound.contains("-0.333"), "{}", v.bound);
        assert!(EquicorrelatedModel::uniform(4, -1.0, 1.0, -1.0 / 3.0).validate().is_ok());
    }

    #[test]
    fn reports_every_violation() {
        let bad = AsymmetricNormalModel {
            mu_u: 1.0,
            mu_v: f64::NAN,
            sigma_u: 0.0,
            sigma_v: -2.0,
            rho: 1.5,
            p_u: 2.0,
        };
        let err = bad.validate().unwrap_err();
        let fields: Vec<_> = err.violations.iter().map(|v| v.field).collect();
        assert_eq!(fields, ["mu_u", "mu_v", "sigma_u", "sigma_v", "rho", "p_u"]);
        let text = err.to_string();
        assert!(text.contains("mu_v is missing"), "{text}");
        assert!(text.contains("sigma_u > 0"), "{text}");
    }

    #[test]
    fn relaxed_mode_only_needs_a_negative_sum() {
        let m = AsymmetricNormalModel {
            mu_u: 0.4,
            mu_v: -1.0,
            sigma_u: 1.0,
            sigma_v: 1.0,
            rho: 0.0,
            p_u: 0.5,
        };
        assert!(m.validate().is_err());
        assert!(m.validate_with(ValidationMode::Relaxed).is_ok());
        let m = AsymmetricNormalModel { mu_u: 1.5, ..m };
        let err = m.validate_with(ValidationMode::Relaxed).unwrap_err();
        assert_eq!(err.violations[0].assumption, Assumption::NegativeMeanSum);
    }

    #[test]
    fn student_t_requires_finite_variance() {
        let err = StudentTModel::new(-1.0, 1.0, 0.0, 2.0).validate().unwrap_err();
        assert_eq!(err.violations[0].assumption, Assumption::FiniteVariance);
        assert!(StudentTModel::new(-1.0, 1.0, 0.0, 2.0001).validate().is_ok());
    }

    #[test]
    fn priority_vector_must_be_a_distribution() {
        let mut m = EquicorrelatedModel::uniform(3, -1.0, 1.0, 0.0);
        m.priority_probs = vec![0.5, 0.5, 0.5];
        let err = m.clone().validate().unwrap_err();
        assert!(err.violations.iter().any(|v| v.field == "sum(priority_probs)"));
        m.priority_probs = vec![1.0, 0.0];
        assert!(m.validate().is_err());
    }

    #[test]
    fn degenerate_correlation_is_flagged_not_rejected() {
        let m = SymmetricNormalModel::new(-1.0, 1.0, -1.0).validate().unwrap();
        assert!(m.is_degenerate());
        let m = EquicorrelatedModel::uniform(3, -1.0, 1.0, -0.5).validate().unwrap();
        assert!(m.is_degenerate());
    }

    #[test]
    fn hurdle_vectors() {
        assert_eq!(HurdlePolicy::Common(0.5).hurdles(Regime::Multi, 3).unwrap(), vec![0.5; 3]);
        let pair = HurdlePolicy::PerDimension { z_u: 1.0, z_v: 2.0 };
        assert_eq!(pair.hurdles(Regime::Asymmetric, 2).unwrap(), vec![1.0, 2.0]);
        assert!(pair.hurdles(Regime::Multi, 3).is_err());
    }

    proptest! {
        #[test]
        fn validation_is_total_and_idempotent(
            mu in -5.0f64..5.0,
            sigma in -2.0f64..3.0,
            rho in -1.5f64..1.5,
            p_u in -0.5f64..1.5,
            delta in 0.0f64..10.0,
        ) {
            let t = StudentTModel { mu, sigma, rho, delta, p_u };
            match t.validate() {
                Ok(v) => {
                    let again = v.clone().into_inner().validate().unwrap();
                    prop_assert_eq!(again, v);
                }
                Err(report) => {
                    let expected = usize::from(mu >= 0.0)
                        + usize::from(sigma <= 0.0)
                        + usize::from(!(-1.0..=1.0).contains(&rho))
                        + usize::from(delta <= 2.0)
                        + usize::from(!(0.0..=1.0).contains(&p_u));
                    prop_assert_eq!(report.violations.len(), expected);
                }
            }
        }
    }
}
