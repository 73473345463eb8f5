//! Limiting spectral laws of Gaussian random matrices.
//!
//! Three asymptotic densities: the quarter-circle law of normalized
//! singular values of a square iid Gaussian matrix, the Marcenko-Pastur
//! law of the squared singular values, and the semicircle law of GUE
//! eigenvalues. Each exposes its density, CDF, inverse CDF and the
//! upper-tail partial moments that the threshold formulas consume.
//!
//! CDFs and moments are evaluated by adaptive composite Gauss-Legendre
//! quadrature after a trigonometric substitution that removes the
//! square-root endpoint singularities; inverse CDFs by bracketed
//! bisection. All routines are pure.

use crate::quadrature::{bisect, integrate};
use crate::{Error, Result};

/// Absolute quadrature tolerance; thresholds need ~1e-10 moment accuracy.
const QUAD_TOL: f64 = 1e-13;
/// Bisection tolerance on the abscissa for inverse CDFs.
const INV_XTOL: f64 = 1e-12;

/// One of the three limiting spectral densities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralLaw {
    /// Normalized singular values of G(n, n): sqrt(4 - x^2) / pi on [0, 2].
    QuarterCircle,
    /// Normalized eigenvalues of X^T X: sqrt(4x - x^2) / (2 pi x) on [0, 4].
    MarcenkoPastur,
    /// Normalized GUE eigenvalues: sqrt(4 - x^2) / (2 pi) on [-2, 2].
    Semicircle,
}

/// Order of a partial moment: first (gamma) or second (gamma_2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentOrder {
    First,
    Second,
}

impl MomentOrder {
    fn exponent(self) -> i32 {
        match self {
            MomentOrder::First => 1,
            MomentOrder::Second => 2,
        }
    }
}

impl SpectralLaw {
    /// Closed support interval of the density.
    pub fn support(self) -> (f64, f64) {
        match self {
            SpectralLaw::QuarterCircle => (0.0, 2.0),
            SpectralLaw::MarcenkoPastur => (0.0, 4.0),
            SpectralLaw::Semicircle => (-2.0, 2.0),
        }
    }

    /// Density value at `x`; zero outside the support.
    pub fn density(self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return 0.0;
        }
        match self {
            SpectralLaw::QuarterCircle => (4.0 - x * x).max(0.0).sqrt() / std::f64::consts::PI,
            SpectralLaw::MarcenkoPastur => {
                if x == 0.0 {
                    return f64::INFINITY; // integrable 1/sqrt(x) singularity
                }
                (4.0 * x - x * x).max(0.0).sqrt() / (2.0 * std::f64::consts::PI * x)
            }
            SpectralLaw::Semicircle => {
                (4.0 - x * x).max(0.0).sqrt() / (2.0 * std::f64::consts::PI)
            }
        }
    }

    /// Integral of `x^k * density` over `[a, b]`, both inside the support.
    ///
    /// Substitutions x = 2 sin(theta) (quarter-circle, semicircle) and
    /// x = 4 sin^2(theta) (Marcenko-Pastur) turn the integrand into a
    /// smooth trigonometric polynomial.
    fn moment_integral(self, k: i32, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let pi = std::f64::consts::PI;
        match self {
            SpectralLaw::QuarterCircle => {
                let (ta, tb) = ((a / 2.0).asin(), (b / 2.0).asin());
                integrate(
                    |t| {
                        let (s, c) = t.sin_cos();
                        (2.0 * s).powi(k) * 4.0 * c * c / pi
                    },
                    ta,
                    tb,
                    QUAD_TOL,
                )
            }
            SpectralLaw::Semicircle => {
                let (ta, tb) = ((a / 2.0).asin(), (b / 2.0).asin());
                integrate(
                    |t| {
                        let (s, c) = t.sin_cos();
                        (2.0 * s).powi(k) * 2.0 * c * c / pi
                    },
                    ta,
                    tb,
                    QUAD_TOL,
                )
            }
            SpectralLaw::MarcenkoPastur => {
                let (ta, tb) = ((a / 4.0).sqrt().asin(), (b / 4.0).sqrt().asin());
                integrate(
                    |t| {
                        let (s, c) = t.sin_cos();
                        (4.0 * s * s).powi(k) * 4.0 * c * c / pi
                    },
                    ta,
                    tb,
                    QUAD_TOL,
                )
            }
        }
    }

    /// CDF at `x`; arguments outside the support clamp to 0 or 1.
    pub fn cdf(self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        self.moment_integral(0, lo, x)
    }

    /// Inverse CDF by bracketed bisection to 1e-12 on the abscissa.
    pub fn inv_cdf(self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
        }
        let (lo, hi) = self.support();
        if p == 0.0 {
            return Ok(lo);
        }
        if p == 1.0 {
            return Ok(hi);
        }
        Ok(bisect(|x| self.cdf(x) - p, lo, hi, INV_XTOL))
    }
}

/// Upper-tail partial moment of a law: the integral of `x^order * density`
/// over the top `beta` fraction of the mass. Order one gives gamma, order
/// two gives gamma_2 (and their semicircle counterparts).
pub fn gamma_moment(law: SpectralLaw, order: MomentOrder, beta: f64) -> f64 {
    let (lo, hi) = law.support();
    if beta <= 0.0 {
        return 0.0;
    }
    let a = if beta >= 1.0 {
        lo
    } else {
        law.inv_cdf(1.0 - beta).expect("1 - beta is in [0, 1]")
    };
    law.moment_integral(order.exponent(), a, hi)
}

/// A partial moment together with the inputs that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialMoment {
    pub law: SpectralLaw,
    pub order: MomentOrder,
    pub beta: f64,
    pub value: f64,
}

impl PartialMoment {
    pub fn compute(law: SpectralLaw, order: MomentOrder, beta: f64) -> Self {
        PartialMoment {
            law,
            order,
            beta,
            value: gamma_moment(law, order, beta),
        }
    }
}
