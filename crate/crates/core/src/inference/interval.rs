use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::argmax::ArgmaxLaw;
use super::hac::{long_run_covariance, robust_segment_covariance, scores, Bandwidth};
use crate::error::{BreakError, Result};
use crate::seg::BreakSet;
use crate::series::TimeSeries;

/// Which second moments may differ across regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Heterogeneity {
    pub regressors: bool,
    pub errors: bool,
}

impl Default for Heterogeneity {
    fn default() -> Self {
        Self {
            regressors: true,
            errors: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalStatus {
    Ok,
    /// Adjacent regimes have equal coefficients; the interval collapses to
    /// the point estimate.
    ZeroShift,
    /// The limiting law puts less than `(1 - level)/2` mass on one side of
    /// zero; the interval was widened to contain the point estimate.
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakInterval {
    pub break_index: usize,
    pub lower_index: usize,
    pub upper_index: usize,
    pub point_period: i64,
    pub lower_period: i64,
    pub upper_period: i64,
    pub level: f64,
    pub status: IntervalStatus,
}

impl BreakInterval {
    pub fn width(&self) -> usize {
        self.upper_index - self.lower_index
    }

    pub fn covers_index(&self, idx: usize) -> bool {
        (self.lower_index..=self.upper_index).contains(&idx)
    }
}

fn quad(delta: &DVector<f64>, m: &DMatrix<f64>) -> f64 {
    (delta.transpose() * m * delta)[(0, 0)]
}

/// Asymptotic confidence intervals for every break date.
///
/// The rescaled estimation error `(D'Q1 D)^2 / (D'O1 D) * (T_hat - T0)`
/// converges to the argmax of a two-sided drifted Brownian motion, where `D`
/// is the coefficient shift, `Q_i` the regressor second moments and `O_i`
/// the long-run score covariances on either side. Quantiles of that law are
/// found by root-finding and mapped back to observation indices (rounded
/// outward) and then to calendar periods.
pub fn break_confidence_interval(
    series: &TimeSeries,
    breaks: &BreakSet,
    level: f64,
    het: Heterogeneity,
    bandwidth: Bandwidth,
) -> Result<Vec<BreakInterval>> {
    if breaks.m() == 0 {
        return Err(BreakError::NotEnoughBreaks);
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(BreakError::InvalidArgument(format!(
            "confidence level {level} outside (0, 1)"
        )));
    }
    let n = series.len();
    let segments = robust_segment_covariance(series, breaks, bandwidth)?;

    let (pooled_q, pooled_omega) = {
        let design = series.design(0, n);
        let residuals =
            DVector::from_iterator(n, segments.iter().flat_map(|s| s.residuals.iter().copied()));
        let q = design.transpose() * &design / n as f64;
        let (omega, _) = long_run_covariance(&scores(&design, &residuals), bandwidth);
        (q, omega)
    };

    let tail = (1.0 - level) / 2.0;
    let mut out = Vec::with_capacity(breaks.m());
    for (i, &point) in breaks.indices().iter().enumerate() {
        let left = &segments[i];
        let right = &segments[i + 1];
        let delta = &right.coefficients - &left.coefficients;
        let magnitude = left
            .coefficients
            .amax()
            .max(right.coefficients.amax())
            .max(1.0);

        let collapsed = |status| BreakInterval {
            break_index: point,
            lower_index: point,
            upper_index: point,
            point_period: series.period_at(point),
            lower_period: series.period_at(point),
            upper_period: series.period_at(point),
            level,
            status,
        };

        if delta.amax() <= 1e-12 * magnitude {
            out.push(collapsed(IntervalStatus::ZeroShift));
            continue;
        }

        let (q1, q2) = if het.regressors {
            (&left.q_matrix, &right.q_matrix)
        } else {
            (&pooled_q, &pooled_q)
        };
        let (o1, o2) = if het.errors {
            (&left.long_run_variance, &right.long_run_variance)
        } else {
            (&pooled_omega, &pooled_omega)
        };
        let qp1 = quad(&delta, q1);
        let qp2 = quad(&delta, q2);
        let mut op1 = quad(&delta, o1);
        let mut op2 = quad(&delta, o2);
        if qp1 <= 0.0 || qp2 <= 0.0 {
            out.push(collapsed(IntervalStatus::ZeroShift));
            continue;
        }
        // a perfectly fitted regime borrows the other side's variance
        if op1 <= 0.0 {
            op1 = op2;
        }
        if op2 <= 0.0 {
            op2 = op1;
        }
        if op1 <= 0.0 {
            out.push(collapsed(IntervalStatus::Ok));
            continue;
        }

        let xi = if het.regressors { qp2 / qp1 } else { 1.0 };
        let law = ArgmaxLaw::new(xi, (op1 / qp1).sqrt(), (op2 / qp2).sqrt());
        let scale = op1 / (qp1 * qp1);
        let p0 = law.cdf(0.0);
        let status = if p0 < tail || p0 > 1.0 - tail {
            IntervalStatus::Unstable
        } else {
            IntervalStatus::Ok
        };
        let q_lo = law.quantile(tail);
        let q_hi = law.quantile(1.0 - tail);

        let p = point as f64;
        let lower = (p - (scale * q_hi).ceil()).min(p).max(1.0);
        let upper = (p - (scale * q_lo).floor()).max(p).min((n - 1) as f64);
        let lower_index = lower as usize;
        let upper_index = upper as usize;
        out.push(BreakInterval {
            break_index: point,
            lower_index,
            upper_index,
            point_period: series.period_at(point),
            lower_period: series.period_at(lower_index),
            upper_period: series.period_at(upper_index),
            level,
            status,
        });
    }
    Ok(out)
}
