//! Gap-free, evenly spaced observation sequences.

use nalgebra::{DMatrix, DVector};

use crate::error::{BreakError, Result};

/// An ordered series `y_1..y_T` with optional regressor rows `z_t`.
///
/// Periods are integers (years) increasing by exactly one. Without
/// explicit regressors the model is intercept-only (`q = 1`, `z_t = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    series_id: String,
    periods: Vec<i64>,
    values: Vec<f64>,
    regressors: Option<DMatrix<f64>>,
}

impl TimeSeries {
    pub fn new(series_id: impl Into<String>, periods: Vec<i64>, values: Vec<f64>) -> Result<Self> {
        if periods.len() != values.len() {
            return Err(BreakError::InvalidSeries(format!(
                "{} periods but {} values",
                periods.len(),
                values.len()
            )));
        }
        if periods.is_empty() {
            return Err(BreakError::InvalidSeries("empty series".into()));
        }
        for w in periods.windows(2) {
            if w[1] != w[0] + 1 {
                return Err(BreakError::InvalidSeries(format!(
                    "periods must increase by one; found {} followed by {}",
                    w[0], w[1]
                )));
            }
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(BreakError::InvalidSeries(format!(
                "non-finite value at period {}",
                periods[pos]
            )));
        }
        Ok(Self {
            series_id: series_id.into(),
            periods,
            values,
            regressors: None,
        })
    }

    /// Series with periods `1..=T`.
    pub fn from_values(series_id: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let periods = (1..=values.len() as i64).collect();
        Self::new(series_id, periods, values)
    }

    /// Attach a `T x q` regressor matrix (one row per period).
    pub fn with_regressors(mut self, regressors: DMatrix<f64>) -> Result<Self> {
        if regressors.nrows() != self.values.len() {
            return Err(BreakError::InvalidSeries(format!(
                "regressor matrix has {} rows for {} observations",
                regressors.nrows(),
                self.values.len()
            )));
        }
        if regressors.ncols() == 0 {
            return Err(BreakError::InvalidSeries("regressor dimension must be >= 1".into()));
        }
        if regressors.iter().any(|v| !v.is_finite()) {
            return Err(BreakError::InvalidSeries("non-finite regressor entry".into()));
        }
        self.regressors = Some(regressors);
        Ok(self)
    }

    pub fn series_id(&self) -> &str {
        &self.series_id
    }

    pub fn periods(&self) -> &[i64] {
        &self.periods
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Regressor dimension `q`.
    pub fn q(&self) -> usize {
        self.regressors.as_ref().map_or(1, |z| z.ncols())
    }

    pub fn is_intercept_only(&self) -> bool {
        self.regressors.is_none()
    }

    pub fn regressors(&self) -> Option<&DMatrix<f64>> {
        self.regressors.as_ref()
    }

    /// Regressor row for 0-based observation `t`.
    pub fn z_row(&self, t: usize) -> DVector<f64> {
        match &self.regressors {
            Some(z) => z.row(t).transpose(),
            None => DVector::from_element(1, 1.0),
        }
    }

    /// Design matrix rows `start..end` (0-based, exclusive end).
    pub fn design(&self, start: usize, end: usize) -> DMatrix<f64> {
        match &self.regressors {
            Some(z) => z.rows(start, end - start).into_owned(),
            None => DMatrix::from_element(end - start, 1, 1.0),
        }
    }

    /// Calendar period of 1-based observation index `idx`.
    pub fn period_at(&self, idx: usize) -> i64 {
        self.periods[idx - 1]
    }

    /// Restrict to periods `first..=last`.
    pub fn window(&self, first: i64, last: i64) -> Result<Self> {
        let lo = self.periods.iter().position(|&p| p >= first);
        let hi = self.periods.iter().rposition(|&p| p <= last);
        let (lo, hi) = match (lo, hi) {
            (Some(lo), Some(hi)) if lo <= hi => (lo, hi),
            _ => {
                return Err(BreakError::InvalidSeries(format!(
                    "window {first}-{last} does not overlap periods {}-{}",
                    self.periods[0],
                    self.periods[self.periods.len() - 1]
                )))
            }
        };
        Ok(Self {
            series_id: self.series_id.clone(),
            periods: self.periods[lo..=hi].to_vec(),
            values: self.values[lo..=hi].to_vec(),
            regressors: self
                .regressors
                .as_ref()
                .map(|z| z.rows(lo, hi - lo + 1).into_owned()),
        })
    }

    /// Same periods and regressors, new values.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: self.values.iter().map(|&v| f(v)).collect(),
            ..self.clone()
        }
    }

    /// The series read backwards in time (periods relabelled `1..=T`).
    pub fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        let regressors = self.regressors.as_ref().map(|z| {
            let n = z.nrows();
            DMatrix::from_fn(n, z.ncols(), |r, c| z[(n - 1 - r, c)])
        });
        Self {
            series_id: self.series_id.clone(),
            periods: (1..=values.len() as i64).collect(),
            values,
            regressors,
        }
    }
}
