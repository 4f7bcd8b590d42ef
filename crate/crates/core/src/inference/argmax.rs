//! Distribution of the argmax of the two-sided drifted Brownian process
//!
//! ```text
//! Z(s) = W1(-s) - |s|/2                              s <= 0
//! Z(s) = sqrt(xi) * (phi2/phi1) * W2(s) - xi*|s|/2   s >  0
//! ```
//!
//! which is the limit of the rescaled break-date estimator when the
//! regressor moments (`xi`) and error long-run variances (`phi1`, `phi2`)
//! differ across the break.

use statrs::function::erf::erfc;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `ln P(N(0,1) <= -z)`.
fn ln_norm_cdf_neg(z: f64) -> f64 {
    if z < 30.0 {
        (0.5 * erfc(z / std::f64::consts::SQRT_2)).ln()
    } else {
        // Mills-ratio asymptotic series
        let z2 = z * z;
        let series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
        -0.5 * z2 - z.ln() - LN_SQRT_2PI + series.ln()
    }
}

/// Parameters of the limiting process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArgmaxLaw {
    pub xi: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl ArgmaxLaw {
    pub const STANDARD: Self = Self {
        xi: 1.0,
        phi1: 1.0,
        phi2: 1.0,
    };

    pub fn new(xi: f64, phi1: f64, phi2: f64) -> Self {
        Self { xi, phi1, phi2 }
    }

    /// `P(argmax Z <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let xi = self.xi;
        let phi = xi * (self.phi2 / self.phi1).powi(2);
        if x < 0.0 {
            left_tail(-x, xi, phi)
        } else {
            right_cdf(x, xi, phi)
        }
    }

    /// Quantile by bracketing and bisection; the returned point has CDF
    /// within `1e-8` of `p` (or is pinned to floating-point resolution).
    pub fn quantile(&self, p: f64) -> f64 {
        assert!(p > 0.0 && p < 1.0, "probability must lie in (0, 1)");
        let at_zero = self.cdf(0.0);
        let (mut lo, mut hi) = if p >= at_zero {
            let mut hi = 1.0;
            while self.cdf(hi) < p && hi < 1e12 {
                hi *= 2.0;
            }
            (0.0, hi)
        } else {
            let mut lo = -1.0;
            while self.cdf(lo) > p && lo > -1e12 {
                lo *= 2.0;
            }
            (lo, 0.0)
        };
        let mut mid = 0.5 * (lo + hi);
        for _ in 0..400 {
            mid = 0.5 * (lo + hi);
            let f = self.cdf(mid);
            if (f - p).abs() <= 1e-10 {
                break;
            }
            if f < p {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-12 * (1.0 + mid.abs()) {
                break;
            }
        }
        mid
    }
}

fn left_tail(x: f64, xi: f64, phi: f64) -> f64 {
    let frac = xi / phi;
    let sx = x.sqrt();
    let a = -(0.5 * x.ln() - x / 8.0 - LN_SQRT_2PI).exp();
    let b = -(phi / xi) * (phi + 2.0 * xi) / (phi + xi)
        * (frac * (1.0 + frac) * x / 2.0 + ln_norm_cdf_neg((0.5 + frac) * sx)).exp();
    let c = ((x / 2.0 - 2.0 + (phi + 2.0 * xi).powi(2) / ((phi + xi) * xi)).ln()
        + ln_norm_cdf_neg(sx / 2.0))
    .exp();
    (a + b + c).clamp(0.0, 1.0)
}

fn right_cdf(x: f64, xi: f64, phi: f64) -> f64 {
    let frac = xi * xi / phi;
    let sx = x.sqrt();
    let a = frac.sqrt() * (0.5 * x.ln() - frac * x / 8.0 - LN_SQRT_2PI).exp();
    let b = (xi / phi) * (2.0 * phi + xi) / (phi + xi)
        * ((phi + xi) * x / 2.0 + ln_norm_cdf_neg((phi + xi / 2.0) / phi.sqrt() * sx)).exp();
    let c = (((2.0 * phi + xi).powi(2) / ((phi + xi) * phi) - 2.0 + frac * x / 2.0).ln()
        + ln_norm_cdf_neg(frac.sqrt() * sx / 2.0))
    .exp();
    (1.0 + a + b - c).clamp(0.0, 1.0)
}
