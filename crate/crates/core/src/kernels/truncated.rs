use crate::error::{require_finite, require_positive, Result};
use crate::kernels::{normal, student_t};

/// E[X | X > z] for X ~ N(μ, σ²): μ + σ·λ((z − μ)/σ).
pub fn truncated_normal_mean(mu: f64, sigma: f64, z: f64) -> Result<f64> {
    require_finite("mu", mu)?;
    require_positive("sigma", sigma)?;
    require_finite("z", z)?;
    let a = (z - mu) / sigma;
    Ok(mu + sigma / normal::mills(a))
}

/// E[X | X > z] for X = μ + σ·T with T standard Student t on δ > 2 degrees
/// of freedom:
///
/// ```text
/// μ + σ·(δ/(δ−2))·t_{δ−2}(a; 0, δ/(δ−2)) / (1 − T_δ(a; 0, 1)),  a = (z − μ)/σ
/// ```
pub fn truncated_t_mean(mu: f64, sigma: f64, delta: f64, z: f64) -> Result<f64> {
    require_finite("mu", mu)?;
    require_positive("sigma", sigma)?;
    student_t::require_delta_above_two(delta)?;
    require_finite("z", z)?;
    let a = (z - mu) / sigma;
    Ok(mu + sigma * student_t::ln_excess_ratio(a, delta).exp())
}
