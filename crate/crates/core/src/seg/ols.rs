//! Direct (non-recursive) least squares on one segment.

use nalgebra::{DMatrix, DVector};

use crate::series::TimeSeries;

/// Reciprocal condition threshold below which a design is treated as singular.
pub(crate) const RANK_TOL: f64 = 1e-10;

pub(crate) struct DirectFit {
    pub coefficients: DVector<f64>,
    pub residuals: DVector<f64>,
    pub ssr: f64,
}

/// OLS of `y` on `z` over 0-based rows `start..end`. `None` when the
/// design is rank-deficient.
pub(crate) fn fit_range(series: &TimeSeries, start: usize, end: usize) -> Option<DirectFit> {
    let y = &series.values()[start..end];
    if series.is_intercept_only() {
        let n = y.len() as f64;
        // shift by the first value so constant segments are reproduced exactly
        let origin = y[0];
        let mean = origin + y.iter().map(|v| v - origin).sum::<f64>() / n;
        let residuals = DVector::from_iterator(y.len(), y.iter().map(|v| v - mean));
        let ssr = residuals.iter().map(|r| r * r).sum();
        return Some(DirectFit {
            coefficients: DVector::from_element(1, mean),
            residuals,
            ssr,
        });
    }
    let z = series.design(start, end);
    let y = DVector::from_column_slice(y);
    let coefficients = solve_ls(&z, &y)?;
    let residuals = &y - &z * &coefficients;
    let ssr = residuals.dot(&residuals);
    Some(DirectFit {
        coefficients,
        residuals,
        ssr,
    })
}

pub(crate) fn is_full_rank(z: &DMatrix<f64>) -> bool {
    if z.nrows() < z.ncols() {
        return false;
    }
    let sv = z.clone().svd(false, false).singular_values;
    let max = sv.max();
    let min = sv.min();
    max > 0.0 && min / max > RANK_TOL
}

fn solve_ls(z: &DMatrix<f64>, y: &DVector<f64>) -> Option<DVector<f64>> {
    if !is_full_rank(z) {
        return None;
    }
    let qr = z.clone().qr();
    let qty = qr.q().transpose() * y;
    qr.r().solve_upper_triangular(&qty)
}
