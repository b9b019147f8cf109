//! Standard normal density, distribution and Mills ratio.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{require_finite, Result};
use crate::special::{erfc, FRAC_1_SQRT_2PI};

/// Above this point the Mills ratio is evaluated by continued fraction
/// instead of as a quotient of two vanishing tails.
pub const MILLS_SEAM: f64 = 8.0;

const MILLS_CF_TERMS: u32 = 60;

/// Standard normal density φ.
pub fn pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal distribution function Φ.
pub fn cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail 1 − Φ(x), computed without cancellation.
pub fn sf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// Mills ratio M(α) = (1 − Φ(α)) / φ(α).
///
/// Overflows to `+inf` for α below roughly −37.5, where the true value
/// exceeds `f64::MAX`.
pub fn mills_ratio(alpha: f64) -> Result<f64> {
    require_finite("alpha", alpha)?;
    Ok(mills(alpha))
}

/// Inverse Mills ratio λ(α) = φ(α) / (1 − Φ(α)) = 1 / M(α).
pub fn inverse_mills(alpha: f64) -> Result<f64> {
    mills_ratio(alpha).map(|m| 1.0 / m)
}

/// k(α) = α·M(α), strictly increasing from −∞ to 1 with k(0) = 0.
pub fn k_fn(alpha: f64) -> Result<f64> {
    require_finite("alpha", alpha)?;
    Ok(k(alpha))
}

pub(crate) fn k(alpha: f64) -> f64 {
    if alpha == 0.0 {
        0.0
    } else {
        alpha * mills(alpha)
    }
}

pub(crate) fn mills(alpha: f64) -> f64 {
    if alpha > MILLS_SEAM {
        mills_continued_fraction(alpha)
    } else {
        sf(alpha) / pdf(alpha)
    }
}

/// Laplace's continued fraction 1/(α + 1/(α + 2/(α + 3/(α + …)))),
/// evaluated bottom-up. Sixty terms are far more than needed for α > 8.
pub(crate) fn mills_continued_fraction(alpha: f64) -> f64 {
    let mut tail = 0.0;
    for j in (1..=MILLS_CF_TERMS).rev() {
        tail = f64::from(j) / (alpha + tail);
    }
    1.0 / (alpha + tail)
}
