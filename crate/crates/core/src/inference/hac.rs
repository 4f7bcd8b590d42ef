use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{BreakError, Result};
use crate::seg::{ols, BreakSet};
use crate::series::TimeSeries;

/// Bartlett-kernel truncation rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    /// Include autocovariances up to this lag.
    Fixed(usize),
    /// `floor(4 * (n/100)^(2/9))` lags.
    #[default]
    Auto,
    /// AR(1) plug-in rule for the Bartlett kernel.
    Andrews,
}

impl Bandwidth {
    /// Kernel window `b`: lag `k` gets weight `1 - k/b` for `k < b`.
    pub(crate) fn window(&self, scores: &DMatrix<f64>) -> f64 {
        let n = scores.nrows();
        let b = match *self {
            Bandwidth::Fixed(lags) => lags as f64 + 1.0,
            Bandwidth::Auto => (4.0 * (n as f64 / 100.0).powf(2.0 / 9.0)).floor() + 1.0,
            Bandwidth::Andrews => andrews_window(scores),
        };
        b.clamp(1.0, n.max(1) as f64)
    }
}

fn andrews_window(scores: &DMatrix<f64>) -> f64 {
    let n = scores.nrows();
    if n < 3 {
        return 1.0;
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for col in scores.column_iter() {
        let x = col.as_slice();
        let lagged: f64 = x.windows(2).map(|w| w[0] * w[1]).sum();
        let head: f64 = x[..n - 1].iter().map(|v| v * v).sum();
        if head <= 0.0 {
            continue;
        }
        let rho = (lagged / head).clamp(-0.97, 0.97);
        let resid: f64 = x.windows(2).map(|w| (w[1] - rho * w[0]).powi(2)).sum();
        let s2 = resid / (n - 1) as f64;
        let s4 = s2 * s2;
        num += 4.0 * rho * rho * s4 / ((1.0 - rho).powi(6) * (1.0 + rho).powi(2));
        den += s4 / (1.0 - rho).powi(4);
    }
    if den <= 0.0 {
        return 1.0;
    }
    1.1447 * (num / den * n as f64).cbrt()
}

/// Bartlett-weighted long-run covariance of score rows `g_t`:
/// `G0 + sum_k w_k (G_k + G_k')` with `G_k = (1/n) sum_t g_t g_{t-k}'`.
pub fn long_run_covariance(scores: &DMatrix<f64>, bandwidth: Bandwidth) -> (DMatrix<f64>, f64) {
    let n = scores.nrows();
    let q = scores.ncols();
    let window = bandwidth.window(scores);
    let mut omega = DMatrix::zeros(q, q);
    if n == 0 {
        return (omega, window);
    }
    let mut lag = 0;
    while (lag as f64) < window && lag < n {
        let weight = 1.0 - lag as f64 / window;
        let mut gamma = DMatrix::zeros(q, q);
        for t in lag..n {
            let a = scores.row(t);
            let b = scores.row(t - lag);
            gamma += a.transpose() * b;
        }
        gamma /= n as f64;
        if lag == 0 {
            omega += gamma;
        } else {
            omega += (&gamma + gamma.transpose()) * weight;
        }
        lag += 1;
    }
    let sym = (&omega + omega.transpose()) * 0.5;
    (sym, window)
}

/// HAC inference for one regime.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentInference {
    pub start: usize,
    pub end: usize,
    pub coefficients: DVector<f64>,
    /// Covariance of the coefficient estimates.
    pub covariance: DMatrix<f64>,
    /// Long-run covariance of the scores `z_t u_t`; the long-run error
    /// variance for intercept-only models.
    pub long_run_variance: DMatrix<f64>,
    /// Second-moment matrix `Z'Z / n` of the regime.
    pub q_matrix: DMatrix<f64>,
    pub residuals: DVector<f64>,
    pub kernel_window: f64,
}

impl SegmentInference {
    pub fn std_errors(&self) -> Vec<f64> {
        self.covariance.diagonal().iter().map(|v| v.max(0.0).sqrt()).collect()
    }

    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end < self.start
    }
}

pub(crate) fn scores(design: &DMatrix<f64>, residuals: &DVector<f64>) -> DMatrix<f64> {
    let mut g = design.clone();
    for (mut row, u) in g.row_iter_mut().zip(residuals.iter()) {
        row *= *u;
    }
    g
}

/// Per-regime heteroskedasticity and autocorrelation consistent coefficient
/// covariance `Q^{-1} Omega Q^{-1} / n`, with variances estimated separately
/// in every regime.
pub fn robust_segment_covariance(
    series: &TimeSeries,
    breaks: &BreakSet,
    bandwidth: Bandwidth,
) -> Result<Vec<SegmentInference>> {
    let q = series.q();
    let mut out = Vec::with_capacity(breaks.m() + 1);
    for (start, end) in breaks.regimes(series.len()) {
        let len = (end + 1).saturating_sub(start);
        if len < q + 1 {
            return Err(BreakError::SegmentTooShort {
                start,
                end,
                len,
                needed: q + 1,
            });
        }
        let fit = ols::fit_range(series, start - 1, end)
            .ok_or(BreakError::SingularSegment { start, end })?;
        let design = series.design(start - 1, end);
        let g = scores(&design, &fit.residuals);
        let (omega, window) = long_run_covariance(&g, bandwidth);
        let q_matrix = design.transpose() * &design / len as f64;
        let q_inv = q_matrix
            .clone()
            .try_inverse()
            .ok_or(BreakError::SingularSegment { start, end })?;
        let cov = &q_inv * &omega * &q_inv / len as f64;
        let covariance = (&cov + cov.transpose()) * 0.5;
        out.push(SegmentInference {
            start,
            end,
            coefficients: fit.coefficients,
            covariance,
            long_run_variance: omega,
            q_matrix,
            residuals: fit.residuals,
            kernel_window: window,
        });
    }
    Ok(out)
}
