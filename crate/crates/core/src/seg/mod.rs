//! Exact least-squares segmentation with unknown break dates.
//!
//! A series of length `T` is split into `m + 1` regimes, each of length at
//! least `min_len`, and a separate OLS fit is estimated per regime. Break
//! index `T_j` is the last (1-based) observation of regime `j`, so regime
//! `j` covers observations `T_{j-1}+1 ..= T_j` with `T_0 = 0` and
//! `T_{m+1} = T`.
//!
//! [`compute_ssr_triangle`] precomputes the residual sum of squares for
//! every admissible segment with recursive updates, [`optimal_breaks`]
//! searches all partitions exactly by dynamic programming, and
//! [`brute_force_optimal_breaks`] enumerates them for verification.

mod brute;
mod dp;
pub(crate) mod fit;
pub(crate) mod ols;
mod triangle;

use serde::{Deserialize, Serialize};

use crate::error::{BreakError, Result};

pub use brute::{brute_force_optimal_breaks, ORACLE_MAX_BREAKS, ORACLE_MAX_LEN};
pub use dp::{optimal_breaks, Segmenter};
pub use fit::fit_segments;
pub use triangle::{compute_ssr_triangle, SsrTriangle};

/// Sorted break indices `T_1 < ... < T_m`, each the last index of its regime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BreakSet {
    break_indices: Vec<usize>,
}

impl BreakSet {
    /// Validates ordering and that every regime has at least `min_len`
    /// observations in a series of length `t_len`.
    pub fn new(break_indices: Vec<usize>, t_len: usize, min_len: usize) -> Result<Self> {
        if min_len == 0 {
            return Err(BreakError::InvalidArgument("min_len must be >= 1".into()));
        }
        let mut prev = 0;
        for &b in break_indices.iter().chain(std::iter::once(&t_len)) {
            if b < prev + min_len {
                return Err(BreakError::InvalidArgument(format!(
                    "breaks {break_indices:?} leave a regime shorter than {min_len} in a series of length {t_len}"
                )));
            }
            prev = b;
        }
        Ok(Self { break_indices })
    }

    /// No breaks (one regime).
    pub fn empty() -> Self {
        Self {
            break_indices: Vec::new(),
        }
    }

    pub fn m(&self) -> usize {
        self.break_indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.break_indices
    }

    /// `(start, end)` 1-based inclusive bounds of each regime.
    pub fn regimes(&self, t_len: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m() + 1);
        let mut start = 1;
        for &b in self.break_indices.iter().chain(std::iter::once(&t_len)) {
            out.push((start, b));
            start = b + 1;
        }
        out
    }
}

/// OLS fit of one regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentFit {
    /// First observation (1-based, inclusive).
    pub start: usize,
    /// Last observation (1-based, inclusive).
    pub end: usize,
    pub coefficients: Vec<f64>,
    pub ssr: f64,
}

impl SegmentFit {
    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end < self.start
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentationResult {
    pub breaks: BreakSet,
    pub total_ssr: f64,
    /// Empty until filled by [`fit_segments`].
    pub segment_fits: Vec<SegmentFit>,
}

impl SegmentationResult {
    pub fn m(&self) -> usize {
        self.breaks.m()
    }
}

/// Near-tie tolerance on total SSR. Partitions whose SSR lies within this
/// band of the optimum are treated as tied and resolved lexicographically.
/// `scale` is the one-regime SSR of the whole series so the band moves with
/// affine transformations of the data.
pub(crate) fn tie_tolerance(optimum: f64, scale: f64) -> f64 {
    1e-10 * optimum.abs() + 1e-13 * scale.abs()
}
