//! Log-gamma, log-beta and the regularized incomplete beta function.
//!
//! `erfc` and `lgamma` come from `libm` (a port of the FreeBSD msun
//! routines). The pieces built here are the ones where naive composition
//! of `lgamma` loses precision: log-beta for very unequal arguments (the
//! Student-t normalising constant at 10^9 degrees of freedom) and the
//! incomplete beta continued fraction.

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

pub(crate) fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

pub(crate) fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Remainder of Stirling's series, `ln Γ(x) - [(x - 1/2) ln x - x + ln √(2π)]`.
///
/// Only valid for `x >= 10`, where the truncated series is accurate to a
/// few ulps.
fn stirling_correction(x: f64) -> f64 {
    debug_assert!(x >= 10.0);
    let r = 1.0 / x;
    let r2 = r * r;
    r * (1.0 / 12.0
        - r2 * (1.0 / 360.0
            - r2 * (1.0 / 1260.0
                - r2 * (1.0 / 1680.0 - r2 * (1.0 / 1188.0 - r2 * (691.0 / 360_360.0))))))
}

/// `ln B(a, b)` for `a, b > 0`, stable when one or both arguments are large.
pub(crate) fn ln_beta(a: f64, b: f64) -> f64 {
    let (p, q) = if a < b { (a, b) } else { (b, a) };
    if p >= 10.0 {
        let corr = stirling_correction(p) + stirling_correction(q) - stirling_correction(p + q);
        -0.5 * q.ln() + LN_SQRT_2PI + corr + (p - 0.5) * (p / (p + q)).ln()
            + q * (-p / (p + q)).ln_1p()
    } else if q >= 10.0 {
        let corr = stirling_correction(q) - stirling_correction(p + q);
        ln_gamma(p) + corr + p - p * (p + q).ln() + (q - 0.5) * (-p / (p + q)).ln_1p()
    } else {
        ln_gamma(p) + ln_gamma(q) - ln_gamma(p + q)
    }
}

fn ln_of(x: f64, complement: f64) -> f64 {
    if x > 0.5 {
        (-complement).ln_1p()
    } else {
        x.ln()
    }
}

/// Regularized incomplete beta `I_x(a, b)`.
///
/// Takes both `x` and `y = 1 - x` so callers that know the complement
/// exactly (the Student-t tails) do not lose it to cancellation.
pub(crate) fn beta_reg(a: f64, b: f64, x: f64, y: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let ln_front = a * ln_of(x, y) + b * ln_of(y, x) - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        (ln_front - a.ln()).exp() * beta_continued_fraction(a, b, x)
    } else {
        1.0 - (ln_front - b.ln()).exp() * beta_continued_fraction(b, a, y)
    }
}

/// `ln I_x(a, b)`, finite even where `I_x(a, b)` itself underflows.
pub(crate) fn ln_beta_reg(a: f64, b: f64, x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if y <= 0.0 {
        return 0.0;
    }
    let ln_front = a * ln_of(x, y) + b * ln_of(y, x) - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front - a.ln() + beta_continued_fraction(a, b, x).ln()
    } else {
        (-(ln_front - b.ln()).exp() * beta_continued_fraction(b, a, y)).ln_1p()
    }
}

/// Modified Lentz evaluation of the incomplete beta continued fraction.
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    // Worst case needs O(sqrt(max(a, b))) terms.
    let max_iter = 200 + 20 * (a.max(b).sqrt() as usize);

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=max_iter {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

pub(crate) const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
