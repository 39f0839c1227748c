//! Bessel function of the first kind, order zero.
//!
//! Power series for `|x| <= 12`, Hankel asymptotic expansion beyond.

use std::f64::consts::{FRAC_PI_4, PI};

/// First positive zero of `J0`.
pub const J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;

pub(crate) const SERIES_LIMIT: f64 = 12.0;

pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= SERIES_LIMIT {
        j0_series(ax)
    } else {
        j0_asymptotic(ax)
    }
}

/// `sum (-1)^m (x/2)^(2m) / (m!)^2`, summed until terms stop contributing.
pub(crate) fn j0_series(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut m = 1.0;
    loop {
        term *= -y / (m * m);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && m > y.sqrt() {
            break;
        }
        m += 1.0;
        if m > 200.0 {
            break;
        }
    }
    sum
}

/// `sqrt(2 / (pi x)) (P cos(x - pi/4) - Q sin(x - pi/4))`, with `P` and `Q`
/// truncated at their smallest term.
pub(crate) fn j0_asymptotic(x: f64) -> f64 {
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    // term_k = prod_{j<=k} (2j-1)^2 / (k! (8x)^k); P = 1 - t2 + t4 - ..., Q = -t1 + t3 - ...
    let mut term: f64 = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= odd * odd / (k as f64 * eight_x);
        if term >= last || term < 1e-18 {
            break;
        }
        last = term;
        match k % 4 {
            1 => q -= term,
            2 => p -= term,
            3 => q += term,
            _ => p += term,
        }
    }
    let phase = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * phase.cos() - q * phase.sin())
}
