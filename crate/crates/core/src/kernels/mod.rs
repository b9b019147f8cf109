//! Scalar special functions and truncated moments behind every closed form.
//!
//! All functions are pure and thread-safe.

pub mod normal;
pub mod student_t;
mod truncated;

pub use normal::{inverse_mills, k_fn, mills_ratio};
pub use student_t::w_fn;
pub use truncated::{truncated_normal_mean, truncated_t_mean};

/// Location-scale t density; see [`student_t::pdf`].
pub fn t_pdf(z: f64, mu: f64, sigma2: f64, delta: f64) -> crate::Result<f64> {
    student_t::pdf(z, mu, sigma2, delta)
}

/// Location-scale t distribution function; see [`student_t::cdf`].
pub fn t_cdf(z: f64, mu: f64, sigma2: f64, delta: f64) -> crate::Result<f64> {
    student_t::cdf(z, mu, sigma2, delta)
}
