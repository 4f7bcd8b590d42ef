//! Coefficient uncertainty per regime and confidence intervals for break
//! dates, allowing serially correlated errors whose variance (and regressor
//! moments) can change at each break.

mod argmax;
mod hac;
mod interval;

pub use argmax::ArgmaxLaw;
pub use hac::{long_run_covariance, robust_segment_covariance, Bandwidth, SegmentInference};
pub use interval::{break_confidence_interval, BreakInterval, Heterogeneity, IntervalStatus};
