//! Derivative-free maximization used to cross-check the optimal-hurdle formulas.

use serde::Serialize;

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const MAX_ITER: u32 = 400;
const MAX_SWEEPS: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Argmax {
    pub location: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Argmax2 {
    pub location: [f64; 2],
    pub value: f64,
    pub sweeps: u32,
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// Iterates until the bracket stops shrinking in floating point, so the
/// location is as accurate as the resolution of `f` allows. Ties move the
/// bracket left. Fails if the maximum is not strictly inside the bracket.
pub fn numeric_argmax<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<Argmax> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::NoInteriorMaximum {
            lo,
            hi,
            reason: "bracket must be finite with lo < hi".into(),
        });
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..MAX_ITER {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if !(a < c && c <= d && d < b) {
            break;
        }
    }
    let (location, value) = if fc >= fd { (c, fc) } else { (d, fd) };
    let (f_lo, f_hi) = (f(lo), f(hi));
    if value.is_nan() {
        return Err(Error::NoInteriorMaximum {
            lo,
            hi,
            reason: "objective is not a number".into(),
        });
    }
    if value == f_lo && value == f_hi {
        return Err(Error::NoInteriorMaximum {
            lo,
            hi,
            reason: "objective is flat across the bracket".into(),
        });
    }
    let margin = 1e-9 * (hi - lo);
    if !(value > f_lo && value > f_hi) || location - lo < margin || hi - location < margin {
        return Err(Error::NoInteriorMaximum {
            lo,
            hi,
            reason: format!("largest value {value} is attained at the bracket edge (near {location})"),
        });
    }
    Ok(Argmax { location, value })
}

/// Maximize `g(x, y)` on a rectangle by alternating 1-D searches.
///
/// Converges in one sweep when the cross partial vanishes; later sweeps only
/// confirm the fixed point.
pub fn numeric_argmax_2d<G: Fn(f64, f64) -> f64>(g: G, x: (f64, f64), y: (f64, f64)) -> Result<Argmax2> {
    let mut py = 0.5 * (y.0 + y.1);
    let mut px = f64::NAN;
    for sweep in 1..=MAX_SWEEPS {
        let bx = numeric_argmax(|s| g(s, py), x.0, x.1)?;
        let by = numeric_argmax(|s| g(bx.location, s), y.0, y.1)?;
        let settled = bx.location == px && by.location == py;
        px = bx.location;
        py = by.location;
        if settled || sweep == MAX_SWEEPS {
            return Ok(Argmax2 {
                location: [px, py],
                value: by.value,
                sweeps: sweep,
            });
        }
    }
    unreachable!()
}

/// Maximize `fx(x) + fy(y)` one coordinate at a time. Each search sees only
/// its own term, so a term that is tiny next to the other is still resolved.
pub fn numeric_argmax_separable<Fx, Fy>(fx: Fx, fy: Fy, x: (f64, f64), y: (f64, f64)) -> Result<Argmax2>
where
    Fx: Fn(f64) -> f64,
    Fy: Fn(f64) -> f64,
{
    let bx = numeric_argmax(fx, x.0, x.1)?;
    let by = numeric_argmax(fy, y.0, y.1)?;
    Ok(Argmax2 {
        location: [bx.location, by.location],
        value: bx.value + by.value,
        sweeps: 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_a_smooth_peak() {
        let best = numeric_argmax(|x| -(x - 1.234_567).powi(2), 0.0, 20.0).unwrap();
        assert!((best.location - 1.234_567).abs() < 1e-7);
        let best = numeric_argmax(|x: f64| x.ln() - x / 3.0, 0.5, 40.0).unwrap();
        assert!((best.location - 3.0).abs() < 1e-6);
    }

    #[test]
    fn flat_or_edge_maxima_are_diagnosed() {
        let flat = numeric_argmax(|_| 2.0, 0.0, 1.0).unwrap_err();
        assert!(flat.to_string().contains("flat"), "{flat}");
        let edge = numeric_argmax(|x| x, 0.0, 1.0).unwrap_err();
        assert!(edge.to_string().contains("edge"), "{edge}");
        let edge = numeric_argmax(|x| -x, 0.0, 1.0).unwrap_err();
        assert!(edge.to_string().contains("edge"), "{edge}");
        assert!(numeric_argmax(|x| x, 1.0, 1.0).is_err());
        assert!(numeric_argmax(|_| f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn separable_two_dimensional_peak() {
        let g = |x: f64, y: f64| -(x - 2.0).powi(2) - 3.0 * (y + 0.5).powi(2);
        let best = numeric_argmax_2d(g, (0.0, 10.0), (-4.0, 4.0)).unwrap();
        assert!((best.location[0] - 2.0).abs() < 1e-7);
        assert!((best.location[1] + 0.5).abs() < 1e-7);
        assert!(best.sweeps <= 3);
    }

    #[test]
    fn separable_search_resolves_a_tiny_term() {
        let fx = |x: f64| 1e-13 * (-(x - 6.5).powi(2)).exp();
        let fy = |y: f64| -(y - 1.5).powi(2) + 0.013;
        let best = numeric_argmax_separable(fx, fy, (0.0, 20.0), (0.0, 20.0)).unwrap();
        assert!((best.location[0] - 6.5).abs() < 1e-7);
        assert!((best.location[1] - 1.5).abs() < 1e-7);
        // The joint search cannot see the first term under the second.
        let joint = numeric_argmax_2d(|x, y| fx(x) + fy(y), (0.0, 20.0), (0.0, 20.0));
        assert!(joint.map_or(true, |b| (b.location[0] - 6.5).abs() > 1e-3));
    }

    #[test]
    fn coupled_two_dimensional_peak() {
        let g = |x: f64, y: f64| -(x - 1.0).powi(2) - (y - 2.0).powi(2) - 0.5 * (x - 1.0) * (y - 2.0);
        let best = numeric_argmax_2d(g, (-5.0, 5.0), (-5.0, 5.0)).unwrap();
        assert!((best.location[0] - 1.0).abs() < 1e-6);
        assert!((best.location[1] - 2.0).abs() < 1e-6);
    }
}
