//! End-to-end break analysis of one series, as a serializable report.

use serde::{Deserialize, Serialize};

use crate::error::{BreakError, Result};
use crate::inference::{
    break_confidence_interval, robust_segment_covariance, Bandwidth, BreakInterval, Heterogeneity,
};
use crate::seg::{compute_ssr_triangle, fit_segments, fit::fitted_values};
use crate::selection::SelectionTable;
use crate::series::TimeSeries;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub min_len: usize,
    pub max_m: usize,
    pub level: f64,
    pub heterogeneity: Heterogeneity,
    pub bandwidth: Bandwidth,
    /// Inclusive period range to analyse.
    pub window: Option<(i64, i64)>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            min_len: 4,
            max_m: 8,
            level: 0.95,
            heterogeneity: Heterogeneity::default(),
            bandwidth: Bandwidth::Auto,
            window: None,
        }
    }
}

impl AnalysisOptions {
    pub fn validate(&self) -> Result<()> {
        if self.min_len == 0 {
            return Err(BreakError::InvalidArgument("min_len must be >= 1".into()));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(BreakError::InvalidArgument(format!(
                "confidence level {} outside (0, 1)",
                self.level
            )));
        }
        if let Some((a, b)) = self.window {
            if a > b {
                return Err(BreakError::InvalidArgument(format!("empty window {a}-{b}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentSummary {
    pub start_period: i64,
    pub end_period: i64,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub ssr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub period: i64,
    pub observed: f64,
    pub fitted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakReport {
    pub series_id: String,
    pub first_period: i64,
    pub last_period: i64,
    pub t_len: usize,
    pub options: AnalysisOptions,
    pub selection: SelectionTable,
    pub chosen_m: usize,
    pub break_indices: Vec<usize>,
    pub break_periods: Vec<i64>,
    pub intervals: Vec<BreakInterval>,
    pub segments: Vec<SegmentSummary>,
    pub plot: Vec<PlotPoint>,
}

/// BIC selection, segment fits, HAC standard errors, break-date intervals
/// and plot data for one series.
pub fn analyze_series(series: &TimeSeries, options: &AnalysisOptions) -> Result<BreakReport> {
    options.validate()?;
    let windowed;
    let series = match options.window {
        Some((a, b)) => {
            windowed = series.window(a, b)?;
            &windowed
        }
        None => series,
    };

    let tri = compute_ssr_triangle(series, options.min_len)?;
    let (selection, mut results) =
        SelectionTable::from_triangle(&tri, options.max_m, options.min_len)?;
    let chosen = results[selection.chosen_m]
        .take()
        .expect("chosen row is feasible");
    let fitted = fit_segments(series, &chosen.breaks)?;
    let inference = robust_segment_covariance(series, &fitted.breaks, options.bandwidth)?;
    let intervals = if fitted.m() > 0 {
        break_confidence_interval(
            series,
            &fitted.breaks,
            options.level,
            options.heterogeneity,
            options.bandwidth,
        )?
    } else {
        Vec::new()
    };

    let segments = fitted
        .segment_fits
        .iter()
        .zip(&inference)
        .map(|(fit, inf)| SegmentSummary {
            start_period: series.period_at(fit.start),
            end_period: series.period_at(fit.end),
            coefficients: fit.coefficients.clone(),
            std_errors: inf.std_errors(),
            ssr: fit.ssr,
        })
        .collect();
    let plot = series
        .periods()
        .iter()
        .zip(series.values())
        .zip(fitted_values(series, &fitted))
        .map(|((&period, &observed), fitted)| PlotPoint {
            period,
            observed,
            fitted,
        })
        .collect();

    Ok(BreakReport {
        series_id: series.series_id().to_string(),
        first_period: series.periods()[0],
        last_period: series.periods()[series.len() - 1],
        t_len: series.len(),
        options: options.clone(),
        chosen_m: selection.chosen_m,
        break_periods: fitted
            .breaks
            .indices()
            .iter()
            .map(|&b| series.period_at(b))
            .collect(),
        break_indices: fitted.breaks.indices().to_vec(),
        selection,
        intervals,
        segments,
        plot,
    })
}
