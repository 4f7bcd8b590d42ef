use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::ols;
use crate::error::{BreakError, Result};
use crate::series::TimeSeries;

/// Minimal residual sums of squares `ssr(i, j)` for every segment
/// `i..=j` (1-based) with `j - i + 1 >= min_len`.
#[derive(Debug, Clone, PartialEq)]
pub struct SsrTriangle {
    t_len: usize,
    min_len: usize,
    q: usize,
    // row i (0-based start) holds ends i+min_len-1 ..= t_len-1
    offsets: Vec<usize>,
    cells: Vec<f64>,
}

impl SsrTriangle {
    pub fn t_len(&self) -> usize {
        self.t_len
    }

    pub fn min_len(&self) -> usize {
        self.min_len
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// SSR of segment `i..=j` (1-based, inclusive); `None` if not stored.
    pub fn ssr(&self, i: usize, j: usize) -> Option<f64> {
        if i == 0 || j > self.t_len || j + 1 < i + self.min_len {
            return None;
        }
        Some(self.get0(i - 1, j - 1))
    }

    /// 0-based unchecked access for the DP inner loop.
    #[inline]
    pub(crate) fn get0(&self, start: usize, end: usize) -> f64 {
        self.cells[self.offsets[start] + (end + 1 - start - self.min_len)]
    }

    /// Number of stored cells.
    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }
}

/// Builds the SSR triangle by extending each segment one observation at a
/// time: Welford mean/SSR updates for intercept-only models, recursive
/// least squares (rank-one inverse updates) otherwise.
pub fn compute_ssr_triangle(series: &TimeSeries, min_len: usize) -> Result<SsrTriangle> {
    let t_len = series.len();
    let q = series.q();
    if min_len < q {
        return Err(BreakError::InvalidArgument(format!(
            "min_len {min_len} is smaller than the regressor dimension {q}"
        )));
    }
    if min_len > t_len || t_len < 2 * min_len {
        return Err(BreakError::SeriesTooShort { t_len, min_len });
    }

    let starts = t_len - min_len + 1;
    let rows: Vec<Result<Vec<f64>>> = (0..starts)
        .into_par_iter()
        .map(|start| {
            if series.is_intercept_only() {
                Ok(intercept_row(series.values(), start, min_len))
            } else {
                regression_row(series, start, min_len)
            }
        })
        .collect();

    let mut offsets = Vec::with_capacity(starts);
    let mut cells = Vec::with_capacity(starts * (starts + 1) / 2);
    for row in rows {
        offsets.push(cells.len());
        cells.extend(row?);
    }
    Ok(SsrTriangle {
        t_len,
        min_len,
        q,
        offsets,
        cells,
    })
}

fn intercept_row(y: &[f64], start: usize, min_len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(y.len() - start - min_len + 1);
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (k, &v) in y[start..].iter().enumerate() {
        let n = (k + 1) as f64;
        let d = v - mean;
        mean += d / n;
        m2 += d * (v - mean);
        if k + 1 >= min_len {
            out.push(m2.max(0.0));
        }
    }
    out
}

struct RecursiveFit {
    coef: DVector<f64>,
    // (Z'Z)^{-1}
    p: DMatrix<f64>,
    ssr: f64,
}

fn regression_row(series: &TimeSeries, start: usize, min_len: usize) -> Result<Vec<f64>> {
    let t_len = series.len();
    let q = series.q();
    let y = series.values();
    let mut out = Vec::with_capacity(t_len - start - min_len + 1);
    let mut state: Option<RecursiveFit> = None;

    for end in start..t_len {
        let len = end + 1 - start;
        match state.as_mut() {
            Some(fit) => {
                let z = series.z_row(end);
                let pz = &fit.p * &z;
                let denom = 1.0 + z.dot(&pz);
                let err = y[end] - z.dot(&fit.coef);
                fit.coef += &pz * (err / denom);
                fit.p -= &pz * pz.transpose() / denom;
                fit.ssr += err * err / denom;
            }
            None if len >= q => {
                let design = series.design(start, end + 1);
                if ols::is_full_rank(&design) {
                    let direct = ols::fit_range(series, start, end + 1)
                        .ok_or(BreakError::SingularSegment {
                            start: start + 1,
                            end: end + 1,
                        })?;
                    let xtx = design.transpose() * &design;
                    let p = xtx.try_inverse().ok_or(BreakError::SingularSegment {
                        start: start + 1,
                        end: end + 1,
                    })?;
                    state = Some(RecursiveFit {
                        coef: direct.coefficients,
                        p,
                        ssr: direct.ssr,
                    });
                }
            }
            None => {}
        }
        if len >= min_len {
            let fit = state.as_ref().ok_or(BreakError::SingularSegment {
                start: start + 1,
                end: end + 1,
            })?;
            out.push(guard_ssr(fit.ssr, start, end)?);
        }
    }
    Ok(out)
}

/// Clamps rounding-level negatives to zero and rejects anything worse.
fn guard_ssr(v: f64, start: usize, end: usize) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v > -1e-9 {
        Ok(0.0)
    } else {
        Err(BreakError::NegativeSsr {
            start: start + 1,
            end: end + 1,
            value: v,
        })
    }
}
