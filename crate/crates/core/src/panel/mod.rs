//! Route-year and industry-year panel construction.
//!
//! Raw tables from several historical sources are converted to canonical
//! units (USD per TEU, million TEU), spliced onto each other with constant
//! conversion factors estimated on overlapping years, allocated between
//! directions, imputed from reference series by fixed ratios, interpolated,
//! and finally deflated to constant 1995 dollars. Every output cell records
//! how it was produced.

mod build;
mod config;
mod convert;
mod impute;
pub mod io;
mod stats;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use build::{build_panel, BuildLog, LogEntry, LogEvent, PanelBuild};
pub use config::{
    AllocationConfig, BuildConfig, RatioImputeConfig, RouteMiles, SeriesConfig, SourceRef,
    SourceSpec, Splice,
};
pub use convert::{
    capacity_to_quantity, cpi_adjust, cpi_unadjust, newbuilding_per_teu, scrap_per_teu,
    secondhand_calibration, secondhand_per_teu, tonmile_rate_to_teu, CalibrationSolution,
    SecondhandSteps,
};
pub use impute::{
    allocate_directional, calibrate_overlap, fixed_ratio_impute, interpolate_linear, Allocation,
    Overlap, RatioFill, SpliceFactor,
};
pub use stats::{summarize_panel, summary_stats, SummaryStats};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PanelError {
    #[error("CPI table has no entry for {0}")]
    MissingCpiYear(i32),
    #[error("invalid CPI table: {0}")]
    InvalidCpi(String),
    #[error("no overlapping observations to calibrate on ({0})")]
    NoOverlap(String),
    #[error("zero denominator in conversion ratio at {0}")]
    ZeroDenominator(i32),
    #[error("anchor year {0} is not observed in both target and reference")]
    NoAnchor(i32),
    #[error("reference series has no value for {0}")]
    ReferenceGap(i32),
    #[error("filling {0} would require extrapolation")]
    ExtrapolationRequired(i32),
    #[error("need at least two observed points to interpolate, found {0}")]
    TooFewPoints(usize),
    #[error("{what} must be positive, got {value}")]
    NonPositiveInput { what: &'static str, value: f64 },
    #[error("utilization {0} outside (0, 1]")]
    OutOfRangeUtilization(f64),
    #[error("reference eastbound/westbound values must be positive")]
    ZeroReference,
    #[error("need at least {needed} observations, found {found}")]
    TooFewObservations { needed: usize, found: usize },
    #[error("{file}:{line}: {message}")]
    Schema {
        file: String,
        line: u64,
        message: String,
    },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{} cell(s) failed:\n{}", .0.len(), join_cells(.0))]
    Cells(Vec<CellError>),
}

fn join_cells(cells: &[CellError]) -> String {
    cells
        .iter()
        .map(|c| format!("  {c}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// A failure tied to one source cell or output cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellError {
    pub source: String,
    pub key: String,
    pub year: Option<i32>,
    pub message: String,
}

impl fmt::Display for CellError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.year {
            Some(y) => write!(f, "[{} {} {}] {}", self.source, self.key, y, self.message),
            None => write!(f, "[{} {}] {}", self.source, self.key, self.message),
        }
    }
}

pub type Result<T, E = PanelError> = std::result::Result<T, E>;

/// Units appearing in source tables. The last two are the canonical panel
/// units and pass through unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    #[serde(rename = "usd_per_100ton_mile")]
    UsdPer100TonMile,
    UsdPerFeu,
    UsdPerTeu,
    #[serde(rename = "index_1995_100")]
    Index1995,
    TeuCapacity,
    ThousandTeu,
    MillionTon,
    UsdPerDwtVessel,
    UsdPerLtd,
    #[serde(rename = "usd1995_per_teu")]
    Usd1995PerTeu,
    MillionTeu,
}

impl Unit {
    pub const ALL: [Unit; 11] = [
        Unit::UsdPer100TonMile,
        Unit::UsdPerFeu,
        Unit::UsdPerTeu,
        Unit::Index1995,
        Unit::TeuCapacity,
        Unit::ThousandTeu,
        Unit::MillionTon,
        Unit::UsdPerDwtVessel,
        Unit::UsdPerLtd,
        Unit::Usd1995PerTeu,
        Unit::MillionTeu,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Unit::UsdPer100TonMile => "usd_per_100ton_mile",
            Unit::UsdPerFeu => "usd_per_feu",
            Unit::UsdPerTeu => "usd_per_teu",
            Unit::Index1995 => "index_1995_100",
            Unit::TeuCapacity => "teu_capacity",
            Unit::ThousandTeu => "thousand_teu",
            Unit::MillionTon => "million_ton",
            Unit::UsdPerDwtVessel => "usd_per_dwt_vessel",
            Unit::UsdPerLtd => "usd_per_ltd",
            Unit::Usd1995PerTeu => "usd1995_per_teu",
            Unit::MillionTeu => "million_teu",
        }
    }

    pub fn is_canonical(&self) -> bool {
        matches!(self, Unit::Usd1995PerTeu | Unit::MillionTeu)
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Unit {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Unit::ALL
            .into_iter()
            .find(|u| u.as_str() == s)
            .ok_or_else(|| format!("unknown unit '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Observed,
    Calibrated,
    RatioImputed,
    Interpolated,
    Allocated,
    CapacityDerived,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Observed => "observed",
            Provenance::Calibrated => "calibrated",
            Provenance::RatioImputed => "ratio_imputed",
            Provenance::Interpolated => "interpolated",
            Provenance::Allocated => "allocated",
            Provenance::CapacityDerived => "capacity_derived",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        [
            Provenance::Observed,
            Provenance::Calibrated,
            Provenance::RatioImputed,
            Provenance::Interpolated,
            Provenance::Allocated,
            Provenance::CapacityDerived,
        ]
        .into_iter()
        .find(|p| p.as_str() == s)
        .ok_or_else(|| format!("unknown provenance '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Price,
    Quantity,
}

impl Measure {
    pub fn canonical_unit(&self) -> Unit {
        match self {
            Measure::Price => Unit::Usd1995PerTeu,
            Measure::Quantity => Unit::MillionTeu,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Measure::Price => "price",
            Measure::Quantity => "quantity",
        }
    }
}

/// The six directional routes and three industry price series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKey {
    TransatlanticWb,
    TransatlanticEb,
    TranspacificWb,
    TranspacificEb,
    AsiaEurope,
    EuropeAsia,
    Newbuilding,
    Secondhand,
    Scrap,
}

impl SeriesKey {
    pub const ROUTES: [SeriesKey; 6] = [
        SeriesKey::TransatlanticWb,
        SeriesKey::TransatlanticEb,
        SeriesKey::TranspacificWb,
        SeriesKey::TranspacificEb,
        SeriesKey::AsiaEurope,
        SeriesKey::EuropeAsia,
    ];
    pub const INDUSTRY: [SeriesKey; 3] =
        [SeriesKey::Newbuilding, SeriesKey::Secondhand, SeriesKey::Scrap];

    pub fn as_str(&self) -> &'static str {
        match self {
            SeriesKey::TransatlanticWb => "transatlantic_wb",
            SeriesKey::TransatlanticEb => "transatlantic_eb",
            SeriesKey::TranspacificWb => "transpacific_wb",
            SeriesKey::TranspacificEb => "transpacific_eb",
            SeriesKey::AsiaEurope => "asia_europe",
            SeriesKey::EuropeAsia => "europe_asia",
            SeriesKey::Newbuilding => "newbuilding",
            SeriesKey::Secondhand => "secondhand",
            SeriesKey::Scrap => "scrap",
        }
    }

    pub fn is_route(&self) -> bool {
        Self::ROUTES.contains(self)
    }

    /// Routes touching a U.S. coast.
    pub fn is_us_route(&self) -> bool {
        matches!(
            self,
            SeriesKey::TransatlanticWb
                | SeriesKey::TransatlanticEb
                | SeriesKey::TranspacificWb
                | SeriesKey::TranspacificEb
        )
    }
}

impl fmt::Display for SeriesKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SeriesKey {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ROUTES
            .into_iter()
            .chain(Self::INDUSTRY)
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown series key '{s}'"))
    }
}

/// One source's cells, all in the same unit.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSourceTable {
    pub source_id: String,
    pub unit: Unit,
    pub cells: BTreeMap<(String, i32), f64>,
}

impl RawSourceTable {
    pub fn new(source_id: impl Into<String>, unit: Unit) -> Self {
        Self {
            source_id: source_id.into(),
            unit,
            cells: BTreeMap::new(),
        }
    }

    /// Adds a cell, rejecting duplicates.
    pub fn insert(&mut self, key: impl Into<String>, year: i32, value: f64) -> Result<()> {
        let key = key.into();
        if self.cells.contains_key(&(key.clone(), year)) {
            return Err(PanelError::Config(format!(
                "duplicate cell ({key}, {year}) in source {}",
                self.source_id
            )));
        }
        self.cells.insert((key, year), value);
        Ok(())
    }

    /// All cells for one key, by year.
    pub fn series(&self, key: &str) -> BTreeMap<i32, f64> {
        self.cells
            .range((key.to_string(), i32::MIN)..=(key.to_string(), i32::MAX))
            .map(|((_, y), v)| (*y, *v))
            .collect()
    }
}

/// U.S. CPI levels by year with a base year (1995 by default).
#[derive(Debug, Clone, PartialEq)]
pub struct CpiTable {
    levels: BTreeMap<i32, f64>,
    base_year: i32,
}

impl CpiTable {
    pub const DEFAULT_BASE_YEAR: i32 = 1995;

    pub fn new(levels: BTreeMap<i32, f64>, base_year: i32) -> Result<Self> {
        if let Some((y, v)) = levels.iter().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(PanelError::InvalidCpi(format!("level {v} for {y} is not positive")));
        }
        if !levels.contains_key(&base_year) {
            return Err(PanelError::InvalidCpi(format!("base year {base_year} missing")));
        }
        Ok(Self { levels, base_year })
    }

    pub fn level(&self, year: i32) -> Option<f64> {
        self.levels.get(&year).copied()
    }

    pub fn base_year(&self) -> i32 {
        self.base_year
    }

    pub fn base_level(&self) -> f64 {
        self.levels[&self.base_year]
    }

    pub fn with_base_year(&self, base_year: i32) -> Result<Self> {
        Self::new(self.levels.clone(), base_year)
    }
}

/// One emitted panel cell in canonical units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelRow {
    pub key: SeriesKey,
    pub year: i32,
    pub value: f64,
    pub unit: Unit,
    pub provenance: Provenance,
}

impl PanelRow {
    pub fn measure(&self) -> Measure {
        if self.unit == Unit::MillionTeu {
            Measure::Quantity
        } else {
            Measure::Price
        }
    }
}
