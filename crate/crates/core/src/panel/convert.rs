//! Unit conversions for freight rates and vessel prices.

use serde::{Deserialize, Serialize};

use super::{CpiTable, PanelError, Result};

fn positive(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(PanelError::NonPositiveInput { what, value })
    }
}

/// Nominal USD of `year` to base-year USD: `nominal * CPI(base) / CPI(year)`.
pub fn cpi_adjust(nominal: f64, year: i32, cpi: &CpiTable) -> Result<f64> {
    let level = cpi.level(year).ok_or(PanelError::MissingCpiYear(year))?;
    Ok(nominal * cpi.base_level() / level)
}

/// Inverse of [`cpi_adjust`].
pub fn cpi_unadjust(real: f64, year: i32, cpi: &CpiTable) -> Result<f64> {
    let level = cpi.level(year).ok_or(PanelError::MissingCpiYear(year))?;
    Ok(real * level / cpi.base_level())
}

/// Liner rate quoted in USD per 100 ton-miles to USD per TEU over a route
/// of `miles`.
pub fn tonmile_rate_to_teu(rate: f64, miles: f64, tons_per_teu: f64) -> Result<f64> {
    let rate = positive("ton-mile rate", rate)?;
    let miles = positive("route miles", miles)?;
    let tons_per_teu = positive("tons per TEU", tons_per_teu)?;
    let per_ton = rate * miles / 100.0;
    Ok(per_ton * tons_per_teu)
}

/// Price of an 18,000 dwt bulk carrier to a per-TEU container-ship price:
/// scale linearly to 12,000 dwt, treat one tenth of that as a 1,200 TEU
/// ship, divide by 1,200, then apply the bulk-to-container factor.
pub fn newbuilding_per_teu(price_18000dwt: f64, bulk_to_container_factor: f64) -> Result<f64> {
    let price = positive("newbuilding price", price_18000dwt)?;
    let factor = positive("bulk-to-container factor", bulk_to_container_factor)?;
    let price_12000dwt = price * (12000.0 / 18000.0);
    let per_1200teu = price_12000dwt / 10.0;
    Ok(per_1200teu / 1200.0 * factor)
}

/// Depreciation rate `X` and conversion rate `a` pinned down by the 1981
/// and 1983 secondhand observations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSolution {
    pub depreciation_rate: f64,
    pub conversion_rate: f64,
}

impl CalibrationSolution {
    /// Residuals of `2.7 + 2X - 16a` and `0.8 + 0X - 11a`.
    pub fn residuals(&self) -> [f64; 2] {
        let (x, a) = (self.depreciation_rate, self.conversion_rate);
        [2.7 + 2.0 * x - 16.0 * a, 0.8 + 0.0 * x - 11.0 * a]
    }
}

/// Solves
///
/// ```text
/// 1981: 2.7 + 2X = 16.0a   (18-year depreciation)
/// 1983: 0.8 + 0X = 11a     (20-year depreciation)
/// ```
///
/// The second equation fixes `a`; substituting into the first gives `X`,
/// which comes out negative.
pub fn secondhand_calibration() -> CalibrationSolution {
    let conversion_rate = 0.8 / 11.0;
    let depreciation_rate = (16.0 * conversion_rate - 2.7) / 2.0;
    CalibrationSolution {
        depreciation_rate,
        conversion_rate,
    }
}

/// Intermediate values of the secondhand conversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondhandSteps {
    /// `(raw + 15X) / a`.
    pub age_adjusted: f64,
    pub per_12000dwt: f64,
    pub per_1200teu: f64,
    pub per_teu: f64,
    pub container: f64,
}

pub(crate) fn secondhand_steps(
    raw_price_16000dwt: f64,
    solution: &CalibrationSolution,
    liner_to_container_factor: f64,
) -> Result<SecondhandSteps> {
    let raw = positive("secondhand price", raw_price_16000dwt)?;
    let factor = positive("liner-to-container factor", liner_to_container_factor)?;
    let a = positive("conversion rate", solution.conversion_rate)?;
    let age_adjusted = positive(
        "age-adjusted secondhand price",
        (raw + 15.0 * solution.depreciation_rate) / a,
    )?;
    let per_12000dwt = age_adjusted * (12000.0 / 16000.0);
    let per_1200teu = per_12000dwt / 10.0;
    let per_teu = per_1200teu / 1200.0;
    Ok(SecondhandSteps {
        age_adjusted,
        per_12000dwt,
        per_1200teu,
        per_teu,
        container: per_teu * factor,
    })
}

/// Secondhand 16,000 dwt liner price to a per-TEU container-ship price:
/// add 15 years of depreciation `X` and rescale by `a`, take 12000/16000 of
/// it, divide by 10 and by 1,200, then apply the liner-to-container factor.
pub fn secondhand_per_teu(
    raw_price_16000dwt: f64,
    solution: &CalibrationSolution,
    liner_to_container_factor: f64,
) -> Result<f64> {
    secondhand_steps(raw_price_16000dwt, solution, liner_to_container_factor).map(|s| s.container)
}

/// Scrap price per light displacement ton to USD per TEU: a quarter of the
/// LTD price per dwt, ten dwt per TEU.
pub fn scrap_per_teu(price_per_ltd: f64) -> Result<f64> {
    let price = positive("scrap price", price_per_ltd)?;
    let per_dwt = price / 4.0;
    Ok(per_dwt * 10.0)
}

/// Quantity carried when capacity is used at `utilization` (1.0 = full).
pub fn capacity_to_quantity(capacity_teu: f64, utilization: f64) -> Result<f64> {
    if !(utilization > 0.0 && utilization <= 1.0) {
        return Err(PanelError::OutOfRangeUtilization(utilization));
    }
    if !(capacity_teu.is_finite() && capacity_teu >= 0.0) {
        return Err(PanelError::NonPositiveInput {
            what: "capacity",
            value: capacity_teu,
        });
    }
    Ok(capacity_teu * utilization)
}
