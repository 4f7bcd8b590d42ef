//! Choosing the number of breaks by the Bayesian information criterion.
//!
//! With Gaussian errors the maximized log-likelihood of an `m`-break fit is
//! `-T/2 * (ln(2*pi*SSR/T) + 1)`, and the model has
//! `p_m = (m+1)*q + m + 1` free parameters (regime coefficients, break
//! dates, one error variance), giving
//!
//! ```text
//! BIC(m) = T * (ln(2*pi*SSR_m/T) + 1) + p_m * ln(T)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::seg::{compute_ssr_triangle, fit_segments, SegmentationResult, Segmenter, SsrTriangle};
use crate::series::TimeSeries;

/// A BIC value; `degenerate` marks a perfect fit (SSR <= 0), scored as
/// negative infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BicScore {
    pub value: f64,
    pub degenerate: bool,
}

pub fn parameter_count(m: usize, q: usize) -> usize {
    (m + 1) * q + m + 1
}

pub fn bic(total_ssr: f64, t_len: usize, m: usize, q: usize) -> BicScore {
    if total_ssr <= 0.0 {
        return BicScore {
            value: f64::NEG_INFINITY,
            degenerate: true,
        };
    }
    let t = t_len as f64;
    let p = parameter_count(m, q) as f64;
    BicScore {
        value: t * ((2.0 * std::f64::consts::PI * total_ssr / t).ln() + 1.0) + p * t.ln(),
        degenerate: false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRow {
    pub m: usize,
    /// `None` when the break count is infeasible.
    pub total_ssr: Option<f64>,
    /// `None` when infeasible or degenerate.
    pub bic: Option<f64>,
    pub feasible: bool,
    pub degenerate: bool,
}

impl SelectionRow {
    fn score(&self) -> Option<f64> {
        match (self.feasible, self.degenerate) {
            (false, _) => None,
            (true, true) => Some(f64::NEG_INFINITY),
            (true, false) => self.bic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionTable {
    pub rows: Vec<SelectionRow>,
    pub chosen_m: usize,
}

impl SelectionTable {
    /// Builds the table for `m = 0..=max_m` from a triangle, keeping the
    /// optimal segmentation of every feasible row.
    pub fn from_triangle(
        tri: &SsrTriangle,
        max_m: usize,
        min_len: usize,
    ) -> Result<(Self, Vec<Option<SegmentationResult>>)> {
        let t_len = tri.t_len();
        let q = tri.q();
        let mut seg = Segmenter::new(tri, min_len)?;
        let mut rows = Vec::with_capacity(max_m + 1);
        let mut results = Vec::with_capacity(max_m + 1);
        for m in 0..=max_m {
            let feasible = (m + 1) * min_len <= t_len && parameter_count(m, q) < t_len;
            if !feasible {
                rows.push(SelectionRow {
                    m,
                    total_ssr: None,
                    bic: None,
                    feasible,
                    degenerate: false,
                });
                results.push(None);
                continue;
            }
            let result = seg.solve(m)?;
            let score = bic(result.total_ssr, t_len, m, q);
            rows.push(SelectionRow {
                m,
                total_ssr: Some(result.total_ssr),
                bic: (!score.degenerate).then_some(score.value),
                feasible,
                degenerate: score.degenerate,
            });
            results.push(Some(result));
        }

        let mut chosen_m = 0;
        let mut best = f64::INFINITY;
        for row in &rows {
            if let Some(score) = row.score() {
                if score < best {
                    best = score;
                    chosen_m = row.m;
                }
            }
        }
        Ok((Self { rows, chosen_m }, results))
    }

    pub fn row(&self, m: usize) -> Option<&SelectionRow> {
        self.rows.get(m)
    }
}

/// Computes the triangle once, solves every feasible `m <= max_m`, and
/// returns the table with the fitted segmentation at the BIC minimizer.
pub fn select_breaks(
    series: &TimeSeries,
    max_m: usize,
    min_len: usize,
) -> Result<(SelectionTable, SegmentationResult)> {
    let tri = compute_ssr_triangle(series, min_len)?;
    let (table, mut results) = SelectionTable::from_triangle(&tri, max_m, min_len)?;
    let chosen = results[table.chosen_m]
        .take()
        .expect("chosen row is feasible");
    let fitted = fit_segments(series, &chosen.breaks)?;
    Ok((table, fitted))
}
