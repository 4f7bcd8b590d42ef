use super::{ols, tie_tolerance, BreakSet, SegmentationResult};
use crate::error::{BreakError, Result};
use crate::series::TimeSeries;

pub const ORACLE_MAX_LEN: usize = 30;
pub const ORACLE_MAX_BREAKS: usize = 4;

/// Exhaustive search over every admissible break vector, each regime fitted
/// by direct OLS. Verification oracle for [`super::optimal_breaks`]; uses the
/// same lexicographic tie rule.
pub fn brute_force_optimal_breaks(
    series: &TimeSeries,
    m: usize,
    min_len: usize,
) -> Result<SegmentationResult> {
    let n = series.len();
    if n > ORACLE_MAX_LEN || m > ORACLE_MAX_BREAKS {
        return Err(BreakError::OracleTooLarge { t_len: n, m });
    }
    if min_len == 0 || min_len < series.q() {
        return Err(BreakError::InvalidArgument(format!(
            "min_len {min_len} must be >= max(1, q = {})",
            series.q()
        )));
    }
    if (m + 1) * min_len > n {
        return Err(BreakError::InfeasibleBreakCount { m, min_len, t_len: n });
    }

    let segment_ssr = |start: usize, end: usize| -> Result<f64> {
        ols::fit_range(series, start, end)
            .map(|f| f.ssr)
            .ok_or(BreakError::SingularSegment { start: start + 1, end })
    };

    let mut candidates: Vec<(Vec<usize>, f64)> = Vec::new();
    let mut current = Vec::with_capacity(m);
    enumerate(n, m, min_len, 0, &mut current, &mut |breaks| {
        let mut total = 0.0;
        let mut start = 0;
        for &b in breaks.iter().chain(std::iter::once(&n)) {
            total += segment_ssr(start, b)?;
            start = b;
        }
        candidates.push((breaks.to_vec(), total));
        Ok(())
    })?;

    let optimum = candidates
        .iter()
        .map(|(_, c)| *c)
        .fold(f64::INFINITY, f64::min);
    let tol = tie_tolerance(optimum, segment_ssr(0, n)?);
    // candidates were produced in lexicographic order
    let (breaks, total_ssr) = candidates
        .into_iter()
        .find(|(_, c)| *c <= optimum + tol)
        .expect("at least one admissible partition");

    Ok(SegmentationResult {
        breaks: BreakSet::new(breaks, n, min_len)?,
        total_ssr,
        segment_fits: Vec::new(),
    })
}

fn enumerate(
    n: usize,
    remaining: usize,
    h: usize,
    start: usize,
    current: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if remaining == 0 {
        return visit(current);
    }
    for end in (start + h)..=(n - remaining * h) {
        current.push(end);
        enumerate(n, remaining - 1, h, end, current, visit)?;
        current.pop();
    }
    Ok(())
}
