//! Structural break analysis for annual economic series, and reconstruction
//! of a route-year container-shipping price/quantity panel from
//! heterogeneous historical sources.
//!
//! - [`seg`]: exact global least-squares segmentation (SSR triangle + DP).
//! - [`selection`]: break-count choice by BIC.
//! - [`inference`]: HAC segment covariances and break-date confidence intervals.
//! - [`panel`]: source calibration, imputation, interpolation and CPI deflation.
//! - [`report`]: serializable per-series analysis reports.

pub mod error;
pub mod inference;
pub mod panel;
pub mod report;
pub mod selection;
pub mod seg;
pub mod series;

pub use error::BreakError;
pub use inference::{
    break_confidence_interval, robust_segment_covariance, Bandwidth, BreakInterval, Heterogeneity,
    IntervalStatus, SegmentInference,
};
pub use report::{analyze_series, AnalysisOptions, BreakReport};
pub use selection::{bic, select_breaks, BicScore, SelectionRow, SelectionTable};
pub use seg::{
    brute_force_optimal_breaks, compute_ssr_triangle, fit_segments, optimal_breaks, BreakSet,
    SegmentFit, SegmentationResult, Segmenter, SsrTriangle,
};
pub use series::TimeSeries;
