//! Distribution functions used by the combiners and the data generator.
//!
//! Both functions are evaluated on the tail that is actually needed so that
//! small p-values keep full relative precision.

use std::f64::consts::SQRT_2;

/// Standard normal cdf, `Φ(x) = erfc(-x / √2) / 2`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Standard normal upper tail `1 - Φ(x)`, without cancellation for large `x`.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Survival function of a chi-squared variable with `df = 2ν` degrees of
/// freedom:
///
/// ```text
/// P(X > x) = e^{-x/2} Σ_{i=0}^{ν-1} (x/2)^i / i!
/// ```
///
/// `nu` must be at least 1. Returns 1 for `x <= 0` and 0 for `x = +∞`.
pub fn chi_squared_sf_even(x: f64, nu: usize) -> f64 {
    debug_assert!(nu >= 1);
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    let half = 0.5 * x;
    let mut term = (-half).exp();
    let mut sum = term;
    for i in 1..nu {
        term *= half / i as f64;
        sum += term;
    }
    sum.min(1.0)
}

/// Cdf of a chi-squared variable with `df = 2ν` degrees of freedom.
pub fn chi_squared_cdf_even(x: f64, nu: usize) -> f64 {
    1.0 - chi_squared_sf_even(x, nu)
}
