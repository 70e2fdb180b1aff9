//! Standard normal upper tail.
//!
//! Uses the pure-Rust `libm` erfc (no platform math library) for `t <= 8`
//! and a continued fraction for the Mills ratio beyond, evaluated in log
//! space so that nothing underflows.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};

const LOG_DOMAIN_CUTOFF: f64 = 8.0;

/// `P[Z > t]` for a standard normal `Z`.
pub fn phi_c(t: f64) -> f64 {
    if t <= LOG_DOMAIN_CUTOFF {
        0.5 * libm::erfc(t * FRAC_1_SQRT_2)
    } else {
        libm::exp(log_phi_c(t))
    }
}

/// Natural log of [`phi_c`], finite for every finite `t`.
pub fn log_phi_c(t: f64) -> f64 {
    if t <= LOG_DOMAIN_CUTOFF {
        return libm::log(0.5 * libm::erfc(t * FRAC_1_SQRT_2));
    }
    -0.5 * t * t - 0.5 * libm::log(2.0 * PI) - libm::log(mills_denominator(t))
}

/// `phi(t) / P[Z > t]` as the continued fraction `t + 1/(t + 2/(t + 3/(t + ...)))`,
/// evaluated with the modified Lentz method. Converges quickly for `t > 8`.
fn mills_denominator(t: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = t;
    let mut c = f;
    let mut d = 0.0;
    for j in 1..500 {
        let a = j as f64;
        d = t + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        d = 1.0 / d;
        c = t + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    f
}

/// Whether `Phi^c(a + b) < sqrt(2) exp(-b^2 / 2) Phi^c(a)` holds, compared in log space.
pub fn tail_lemma_check(a: f64, b: f64) -> bool {
    log_phi_c(a + b) < 0.5 * LN_2 - 0.5 * b * b + log_phi_c(a)
}

/// Lower and upper bounds sandwiching `Phi^c(t)` for `t > 0`.
pub fn gordon_bounds(t: f64) -> (f64, f64) {
    let g = libm::exp(-0.5 * t * t) / (2.0 * PI).sqrt();
    (t / (t * t + 1.0) * g, g / t)
}
