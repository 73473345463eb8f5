//! Closed-form oracle for the quarter-circle law, independent of the
//! quadrature path under test. Antiderivatives:
//!   F(x)            = (x sqrt(4 - x^2) / 2 + 2 asin(x/2)) / pi
//!   int x  phi dx   = -(4 - x^2)^{3/2} / (3 pi)
//!   int x^2 phi dx  = (2 t - sin(4 t) / 2) / pi,  t = asin(x/2)

#![allow(dead_code)]

use std::f64::consts::PI;

pub fn qc_cdf(x: f64) -> f64 {
    let x = x.clamp(0.0, 2.0);
    (x * (4.0 - x * x).sqrt() / 2.0 + 2.0 * (x / 2.0).asin()) / PI
}

pub fn qc_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 2.0f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if qc_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Upper-tail first moment over the top `beta` mass.
pub fn qc_gamma(beta: f64) -> f64 {
    if beta <= 0.0 {
        return 0.0;
    }
    let a = if beta >= 1.0 { 0.0 } else { qc_quantile(1.0 - beta) };
    (4.0 - a * a).powf(1.5) / (3.0 * PI)
}

/// Upper-tail second moment over the top `beta` mass.
pub fn qc_gamma2(beta: f64) -> f64 {
    if beta <= 0.0 {
        return 0.0;
    }
    let a = if beta >= 1.0 { 0.0 } else { qc_quantile(1.0 - beta) };
    let t = (a / 2.0).asin();
    (PI - 2.0 * t + (4.0 * t).sin() / 2.0) / PI
}
