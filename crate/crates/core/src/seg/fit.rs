use super::{ols, BreakSet, SegmentFit, SegmentationResult};
use crate::error::{BreakError, Result};
use crate::series::TimeSeries;

/// Per-regime OLS coefficients and residual SSRs for a given break set.
///
/// For intercept-only series the coefficient of each regime is its sample
/// mean.
pub fn fit_segments(series: &TimeSeries, breaks: &BreakSet) -> Result<SegmentationResult> {
    let n = series.len();
    let q = series.q();
    let regimes = breaks.regimes(n);
    if let Some(&(start, end)) = regimes.iter().find(|(s, e)| e < s || e + 1 - s < q) {
        return Err(BreakError::SegmentTooShort {
            start,
            end,
            len: (end + 1).saturating_sub(start),
            needed: q,
        });
    }
    if regimes.last().map(|r| r.1) != Some(n) || breaks.indices().iter().any(|&b| b >= n) {
        return Err(BreakError::InvalidArgument(format!(
            "breaks {:?} do not fit a series of length {n}",
            breaks.indices()
        )));
    }

    let mut segment_fits = Vec::with_capacity(regimes.len());
    for (start, end) in regimes {
        let fit = ols::fit_range(series, start - 1, end)
            .ok_or(BreakError::SingularSegment { start, end })?;
        segment_fits.push(SegmentFit {
            start,
            end,
            coefficients: fit.coefficients.iter().copied().collect(),
            ssr: fit.ssr,
        });
    }
    let total_ssr = segment_fits.iter().map(|f| f.ssr).sum();
    Ok(SegmentationResult {
        breaks: breaks.clone(),
        total_ssr,
        segment_fits,
    })
}

/// Fitted value for every observation under a segmentation.
pub(crate) fn fitted_values(series: &TimeSeries, result: &SegmentationResult) -> Vec<f64> {
    let mut out = Vec::with_capacity(series.len());
    for fit in &result.segment_fits {
        for t in (fit.start - 1)..fit.end {
            let z = series.z_row(t);
            out.push(z.iter().zip(&fit.coefficients).map(|(a, b)| a * b).sum());
        }
    }
    out
}
