use super::{tie_tolerance, BreakSet, SegmentationResult, SsrTriangle};
use crate::error::{BreakError, Result};

/// Dynamic program over suffix optima, reusable across break counts.
///
/// `suffix[k][s]` is the minimal SSR of splitting observations `s..T`
/// (0-based) into `k` regimes of length at least `min_len`. Tables are
/// independent of the total break count, so one `Segmenter` serves every
/// `m` up to the largest one requested.
#[derive(Debug, Clone)]
pub struct Segmenter<'a> {
    tri: &'a SsrTriangle,
    min_len: usize,
    suffix: Vec<Vec<f64>>,
}

impl<'a> Segmenter<'a> {
    pub fn new(tri: &'a SsrTriangle, min_len: usize) -> Result<Self> {
        if min_len < tri.min_len() {
            return Err(BreakError::InvalidArgument(format!(
                "min_len {min_len} is below the triangle's minimum segment length {}",
                tri.min_len()
            )));
        }
        let n = tri.t_len();
        let mut one = vec![f64::INFINITY; n + 1];
        for (s, cost) in one.iter_mut().enumerate().take(n + 1 - min_len) {
            *cost = tri.get0(s, n - 1);
        }
        Ok(Self {
            tri,
            min_len,
            suffix: vec![Vec::new(), one],
        })
    }

    pub fn max_feasible_breaks(&self) -> usize {
        self.tri.t_len() / self.min_len - 1
    }

    fn ensure_tables(&mut self, regimes: usize) {
        let n = self.tri.t_len();
        let h = self.min_len;
        while self.suffix.len() <= regimes {
            let k = self.suffix.len();
            let prev = &self.suffix[k - 1];
            let mut cur = vec![f64::INFINITY; n + 1];
            // s must leave room for k regimes
            if k * h <= n {
                for (s, slot) in cur.iter_mut().enumerate().take(n - k * h + 1) {
                    let last_end = n - (k - 1) * h;
                    let mut best = f64::INFINITY;
                    for end in (s + h)..=last_end {
                        let c = self.tri.get0(s, end - 1) + prev[end];
                        if c < best {
                            best = c;
                        }
                    }
                    *slot = best;
                }
            }
            self.suffix.push(cur);
        }
    }

    /// Globally optimal `m`-break partition; ties within the SSR tolerance go
    /// to the lexicographically smallest break vector.
    pub fn solve(&mut self, m: usize) -> Result<SegmentationResult> {
        let n = self.tri.t_len();
        let h = self.min_len;
        if (m + 1) * h > n {
            return Err(BreakError::InfeasibleBreakCount {
                m,
                min_len: h,
                t_len: n,
            });
        }
        self.ensure_tables(m + 1);
        let optimum = self.suffix[m + 1][0];
        let tol = tie_tolerance(optimum, self.tri.get0(0, n - 1));

        let mut breaks = Vec::with_capacity(m);
        let mut prefix = 0.0;
        let mut start = 0;
        for remaining in (1..=m).rev() {
            let table = &self.suffix[remaining];
            let last_end = n - remaining * h;
            let mut chosen = None;
            let mut argmin = (f64::INFINITY, start + h);
            for end in (start + h)..=last_end {
                let seg = self.tri.get0(start, end - 1);
                let total = prefix + seg + table[end];
                if total <= optimum + tol {
                    chosen = Some((end, seg));
                    break;
                }
                if total < argmin.0 {
                    argmin = (total, end);
                }
            }
            let (end, seg) = chosen.unwrap_or_else(|| {
                let end = argmin.1;
                (end, self.tri.get0(start, end - 1))
            });
            breaks.push(end);
            prefix += seg;
            start = end;
        }
        let total_ssr = prefix + self.tri.get0(start, n - 1);

        Ok(SegmentationResult {
            breaks: BreakSet::new(breaks, n, h)?,
            total_ssr,
            segment_fits: Vec::new(),
        })
    }
}

/// Optimal `m`-break segmentation from a precomputed triangle.
pub fn optimal_breaks(tri: &SsrTriangle, m: usize, min_len: usize) -> Result<SegmentationResult> {
    if (m + 1) * min_len > tri.t_len() {
        return Err(BreakError::InfeasibleBreakCount {
            m,
            min_len,
            t_len: tri.t_len(),
        });
    }
    Segmenter::new(tri, min_len)?.solve(m)
}
