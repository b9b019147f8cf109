//! Location-scale Student t density and distribution, and the W(α) ratio.
//!
//! The density is
//!
//! ```text
//! t_δ(z; μ, σ²) = Γ((δ+1)/2) / (√(σ²δπ) Γ(δ/2)) · (1 + (z−μ)²/(σ²δ))^(−(δ+1)/2)
//! ```
//!
//! so `σ²` acts as a squared *scale*: the variance of this law is
//! `σ²·δ/(δ−2)`. Every closed form in the crate is written against this
//! parameterization.

use crate::error::{require_finite, require_positive, Error, Result};
use crate::special::{beta_reg, ln_beta, ln_beta_reg};

fn check(z: f64, mu: f64, sigma2: f64, delta: f64) -> Result<()> {
    require_finite("z", z)?;
    require_finite("mu", mu)?;
    require_positive("sigma2", sigma2)?;
    require_positive("delta", delta)?;
    Ok(())
}

pub(crate) fn require_delta_above_two(delta: f64) -> Result<f64> {
    if delta > 2.0 && delta.is_finite() {
        Ok(delta)
    } else {
        Err(Error::Domain {
            name: "delta",
            value: delta,
            requirement: "delta > 2 (finite variance)",
        })
    }
}

/// Density t_δ(z; μ, σ²).
pub fn pdf(z: f64, mu: f64, sigma2: f64, delta: f64) -> Result<f64> {
    check(z, mu, sigma2, delta)?;
    Ok(ln_pdf_centered(z - mu, sigma2, delta).exp())
}

/// Distribution function T_δ(z; μ, σ²).
pub fn cdf(z: f64, mu: f64, sigma2: f64, delta: f64) -> Result<f64> {
    check(z, mu, sigma2, delta)?;
    Ok(std_sf(-(z - mu) / sigma2.sqrt(), delta))
}

/// Upper tail 1 − T_δ(z; μ, σ²).
pub fn sf(z: f64, mu: f64, sigma2: f64, delta: f64) -> Result<f64> {
    check(z, mu, sigma2, delta)?;
    Ok(std_sf((z - mu) / sigma2.sqrt(), delta))
}

/// W(α) = ((δ−2)/δ) · (1 − T_δ(α; 0, 1)) / t_{δ−2}(α; 0, δ/(δ−2)).
///
/// This is the Student-t counterpart of the Mills ratio and tends to
/// M(α) as δ → ∞. It equals 1 / E[T | T > α] for a standard t variable T.
pub fn w_fn(alpha: f64, delta: f64) -> Result<f64> {
    require_finite("alpha", alpha)?;
    require_delta_above_two(delta)?;
    Ok(w(alpha, delta))
}

pub(crate) fn w(alpha: f64, delta: f64) -> f64 {
    (-ln_excess_ratio(alpha, delta)).exp()
}

/// ln[(δ/(δ−2)) · t_{δ−2}(α; 0, δ/(δ−2)) / (1 − T_δ(α; 0, 1))], i.e. ln E[T | T > α].
pub(crate) fn ln_excess_ratio(alpha: f64, delta: f64) -> f64 {
    let stretch = delta / (delta - 2.0);
    stretch.ln() + ln_pdf_centered(alpha, stretch, delta - 2.0) - std_ln_sf(alpha, delta)
}

/// ln t_δ(x; 0, σ²).
pub(crate) fn ln_pdf_centered(x: f64, sigma2: f64, delta: f64) -> f64 {
    let q = x * x / (sigma2 * delta);
    -0.5 * (sigma2 * delta).ln() - ln_beta(0.5 * delta, 0.5) - 0.5 * (delta + 1.0) * q.ln_1p()
}

/// Splits `δ/(δ+t²)` and `t²/(δ+t²)` so that neither loses its small end.
fn tail_arguments(t: f64, delta: f64) -> (f64, f64) {
    let t2 = t * t;
    if t2 > delta {
        let r = delta / t2;
        (r / (1.0 + r), 1.0 / (1.0 + r))
    } else {
        let s = t2 / delta;
        (1.0 / (1.0 + s), s / (1.0 + s))
    }
}

/// 1 − T_δ(t; 0, 1).
pub(crate) fn std_sf(t: f64, delta: f64) -> f64 {
    if t == 0.0 {
        return 0.5;
    }
    let (x, y) = tail_arguments(t, delta);
    let beyond = 0.5 * beta_reg(0.5 * delta, 0.5, x, y);
    if t > 0.0 {
        beyond
    } else {
        1.0 - beyond
    }
}

fn std_ln_sf(t: f64, delta: f64) -> f64 {
    if t <= 0.0 {
        return std_sf(t, delta).ln();
    }
    let (x, y) = tail_arguments(t, delta);
    ln_beta_reg(0.5 * delta, 0.5, x, y) - std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::normal;
    use approx::assert_relative_eq;
    use seesaw_testkit::quad::{integrate, integrate_rel};

    #[test]
    fn pdf_examples() {
        assert!((pdf(0.0, 0.0, 1.0, 1e9).unwrap() - 0.398_942_3).abs() < 1e-6);
        assert_relative_eq!(pdf(0.0, 0.0, 1.0, 1e9).unwrap(), normal::pdf(0.0), max_relative = 1e-9);
        // 40-digit evaluation of the displayed formula.
        assert_relative_eq!(
            pdf(1.0, 0.0, 5.0 / 3.0, 3.0).unwrap(),
            0.197_711_817_615_882_52,
            max_relative = 1e-13
        );
        for &mu in &[-3.0, 0.0, 0.7, 12.5] {
            assert_eq!(pdf(mu, mu, 2.0, 4.5).unwrap(), pdf(0.0, 0.0, 2.0, 4.5).unwrap());
        }
    }

    #[test]
    fn pdf_against_gamma_form() {
        // Γ((δ+1)/2) / (√(σ²δπ) Γ(δ/2)) with lgamma, fine for moderate δ.
        for &(d, s2, x) in &[(2.5, 1.0, 0.3), (3.0, 5.0 / 3.0, -2.0), (7.0, 0.4, 1.1), (30.0, 2.0, 4.0)] {
            let c = (libm::lgamma((d + 1.0) / 2.0) - libm::lgamma(d / 2.0)).exp()
                / (s2 * d * std::f64::consts::PI).sqrt();
            let expected = c * (1.0 + x * x / (s2 * d)).powf(-(d + 1.0) / 2.0);
            assert_relative_eq!(pdf(x, 0.0, s2, d).unwrap(), expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn pdf_window_integrates_to_one() {
        for &d in &[3.0, 5.0, 30.0] {
            for &s2 in &[1.0, 4.0] {
                let s = f64::sqrt(s2);
                let total = integrate(|x| pdf(x, 0.0, s2, d).unwrap(), -200.0 * s, 200.0 * s, 1e-10);
                assert!((total - 1.0).abs() < 1e-6, "delta {d}: {total}");
            }
        }
    }

    #[test]
    fn pdf_full_line_integrates_to_one() {
        // x = tan θ maps the real line onto (−π/2, π/2); includes δ = 2.5,
        // whose mass outside ±200 is about 2.5e-6.
        let half_pi = std::f64::consts::FRAC_PI_2;
        for &d in &[2.5, 3.0, 5.0, 30.0] {
            let total = integrate(
                |th: f64| {
                    let c = th.cos();
                    if c <= 0.0 {
                        0.0
                    } else {
                        pdf(th.tan(), 0.0, 1.0, d).unwrap() / (c * c)
                    }
                },
                -half_pi,
                half_pi,
                1e-11,
            );
            assert!((total - 1.0).abs() < 1e-9, "delta {d}: {total}");
        }
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(cdf(0.0, 0.0, 1.0, 5.0).unwrap(), 0.5);
        assert_relative_eq!(cdf(1.0, 0.0, 1.0, 5.0).unwrap(), 0.818_391_266_175_438_7, max_relative = 1e-13);
        let oracle = 0.5 + integrate(|x| pdf(x, 0.0, 1.0, 5.0).unwrap(), 0.0, 1.0, 1e-12);
        assert!((cdf(1.0, 0.0, 1.0, 5.0).unwrap() - oracle).abs() < 1e-8);
        assert!((cdf(1e6, 0.0, 1.0, 5.0).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cdf_consistent_with_pdf_quadrature() {
        for &d in &[2.5, 3.0, 4.2, 10.0, 60.0] {
            for &(mu, s2) in &[(0.0, 1.0), (-1.0, 2.5)] {
                for i in -12..=12 {
                    let z = mu + f64::from(i) * 0.75;
                    let oracle = 0.5 + integrate(|x| pdf(x, mu, s2, d).unwrap(), mu, z, 1e-12);
                    let got = cdf(z, mu, s2, d).unwrap();
                    assert!((got - oracle).abs() < 1e-8, "d={d} z={z}: {got} vs {oracle}");
                    assert!((got + sf(z, mu, s2, d).unwrap() - 1.0).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn large_delta_tends_to_normal() {
        // The relative density gap at δ is about t⁴/(4δ).
        for &t in &[-5.0f64, -2.0, -0.5, 0.5, 1.0, 2.0, 5.0] {
            assert!((cdf(t, 0.0, 1.0, 1e9).unwrap() - normal::cdf(t)).abs() < 1e-9);
            let gap = 1e-9 * (1.0 + t.powi(4));
            assert_relative_eq!(pdf(t, 0.0, 1.0, 1e9).unwrap(), normal::pdf(t), max_relative = gap);
        }
        // 40-digit reference at t = 5.
        assert_relative_eq!(pdf(5.0, 0.0, 1.0, 1e9).unwrap(), 1.486_719_728_078_559_7e-6, max_relative = 1e-12);
    }

    #[test]
    fn w_examples() {
        // 40-digit reference.
        assert_relative_eq!(w_fn(1.0, 5.0).unwrap(), 0.551_131_650_139_578_9, max_relative = 1e-12);
        for &a in &[0.5, 1.0, 2.0] {
            let gap = (w_fn(a, 1e6).unwrap() - normal::mills_ratio(a).unwrap()).abs();
            assert!(gap < 1e-4, "alpha {a}: gap {gap}");
        }
        for &d in &[2.5, 3.0, 7.0, 40.0] {
            let r = d / (d - 2.0);
            let expected = ((d - 2.0) / d) * 0.5 / pdf(0.0, 0.0, r, d - 2.0).unwrap();
            assert_relative_eq!(w_fn(0.0, d).unwrap(), expected, max_relative = 1e-13);
        }
    }

    #[test]
    fn w_direct_composition() {
        for &d in &[2.5, 4.0, 9.0] {
            for &a in &[-1.5, 0.0, 0.4, 1.7, 3.0] {
                let r = d / (d - 2.0);
                let expected =
                    ((d - 2.0) / d) * sf(a, 0.0, 1.0, d).unwrap() / pdf(a, 0.0, r, d - 2.0).unwrap();
                assert_relative_eq!(w_fn(a, d).unwrap(), expected, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn w_increases_with_delta() {
        for &a in &[0.25, 0.5, 1.0, 2.0] {
            let ws: Vec<f64> = [2.5, 3.0, 5.0, 10.0, 100.0]
                .iter()
                .map(|&d| w_fn(a, d).unwrap())
                .collect();
            assert!(ws.windows(2).all(|p| p[0] < p[1]), "alpha {a}: {ws:?}");
            assert!(ws.iter().all(|&v| v > 0.0));
        }
    }

    #[test]
    fn w_stays_positive_deep_in_the_tail() {
        for &d in &[2.5, 30.0, 1e6] {
            for &a in &[20.0, 45.0, 200.0] {
                let v = w_fn(a, d).unwrap();
                assert!(v.is_finite() && v > 0.0, "d={d} a={a}: {v}");
            }
        }
        // E[T | T > α] ≈ α·δ/(δ−1) far in the tail, so W ≈ (δ−1)/(δ α).
        let v = w_fn(1e4, 3.0).unwrap();
        assert_relative_eq!(v, 2.0 / 3.0 / 1e4, max_relative = 1e-6);
    }

    #[test]
    fn domain_errors() {
        assert!(pdf(0.0, 0.0, 0.0, 3.0).is_err());
        assert!(pdf(0.0, 0.0, 1.0, -1.0).is_err());
        assert!(cdf(f64::NAN, 0.0, 1.0, 3.0).is_err());
        assert!(w_fn(1.0, 2.0).is_err());
        assert!(w_fn(1.0, 1.5).is_err());
    }

    #[test]
    fn tail_ratio_matches_truncated_mean_quadrature() {
        // E[T | T > α] by direct integration of x·t_δ(x) over (α, ∞).
        for &d in &[3.0, 6.0] {
            for &a in &[-1.0, 0.0, 1.5] {
                let num = integrate_rel(
                    |th: f64| {
                        let c = th.cos();
                        let x = a + th.tan();
                        if c <= 0.0 { 0.0 } else { x * pdf(x, 0.0, 1.0, d).unwrap() / (c * c) }
                    },
                    0.0,
                    std::f64::consts::FRAC_PI_2,
                    1e-12,
                );
                let mean = num / sf(a, 0.0, 1.0, d).unwrap();
                assert_relative_eq!(1.0 / w_fn(a, d).unwrap(), mean, max_relative = 1e-8);
            }
        }
    }
}
