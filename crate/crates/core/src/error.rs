use thiserror::Error;

/// Errors raised by segmentation, selection and break-date inference.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum BreakError {
    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("series of length {t_len} is too short for minimum segment length {min_len} (need at least {})", 2 * min_len)]
    SeriesTooShort { t_len: usize, min_len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("regressor cross-product is rank-deficient on segment [{start}, {end}]")]
    SingularSegment { start: usize, end: usize },

    #[error("{m} breaks with minimum segment length {min_len} do not fit in {t_len} observations")]
    InfeasibleBreakCount { m: usize, min_len: usize, t_len: usize },

    #[error("brute-force enumeration limited to T <= 30 and m <= 4 (got T = {t_len}, m = {m})")]
    OracleTooLarge { t_len: usize, m: usize },

    #[error("segment [{start}, {end}] has {len} observations, need at least {needed}")]
    SegmentTooShort {
        start: usize,
        end: usize,
        len: usize,
        needed: usize,
    },

    #[error("confidence intervals need at least one break")]
    NotEnoughBreaks,

    #[error("residual sum of squares {value} on segment [{start}, {end}] is negative beyond rounding")]
    NegativeSsr { start: usize, end: usize, value: f64 },
}

pub type Result<T, E = BreakError> = std::result::Result<T, E>;
