//! JSON build configuration.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Measure, PanelError, Result, SeriesKey};

fn default_base_year() -> i32 {
    1995
}
fn default_teu_per_feu() -> f64 {
    2.0
}
fn one() -> f64 {
    1.0
}
fn default_quantity_tons_per_teu() -> f64 {
    10.0
}
fn yes() -> bool {
    true
}

/// Everything `build_panel` needs besides the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildConfig {
    #[serde(default = "default_base_year")]
    pub cpi_base_year: i32,
    /// TEU per FEU for `usd_per_feu` prices.
    #[serde(default = "default_teu_per_feu")]
    pub teu_per_feu: f64,
    /// Tons per TEU for ton-mile freight rates.
    #[serde(default = "one")]
    pub tons_per_teu: f64,
    /// Tons per TEU for `million_ton` trade volumes.
    #[serde(default = "default_quantity_tons_per_teu")]
    pub quantity_tons_per_teu: f64,
    /// Share of `teu_capacity` actually carried.
    #[serde(default = "one")]
    pub utilization: f64,
    #[serde(default = "one")]
    pub bulk_to_container: f64,
    #[serde(default = "one")]
    pub liner_to_container: f64,
    /// Shipping miles per route key, used for ton-mile rates.
    #[serde(default)]
    pub route_miles: BTreeMap<String, RouteMiles>,
    #[serde(default)]
    pub series: Vec<SeriesConfig>,
    #[serde(default)]
    pub allocations: Vec<AllocationConfig>,
}

impl Default for BuildConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config")
    }
}

/// A single distance, or several port pairs whose distances are averaged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RouteMiles {
    Single(f64),
    Legs(Vec<f64>),
}

impl RouteMiles {
    pub fn miles(&self) -> Option<f64> {
        match self {
            RouteMiles::Single(m) => Some(*m),
            RouteMiles::Legs(legs) if !legs.is_empty() => {
                Some(legs.iter().sum::<f64>() / legs.len() as f64)
            }
            RouteMiles::Legs(_) => None,
        }
    }
}

/// One output (or intermediate) series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesConfig {
    pub key: String,
    pub measure: Measure,
    /// Intermediate series (for example a two-way total) set this to false.
    #[serde(default = "yes")]
    pub emit: bool,
    /// In order of precedence: earlier sources win on shared years.
    #[serde(default)]
    pub sources: Vec<SourceSpec>,
    #[serde(default)]
    pub ratio_impute: Option<RatioImputeConfig>,
    #[serde(default = "yes")]
    pub interpolate: bool,
    /// Inclusive year range to emit; every year in it must be filled.
    #[serde(default)]
    pub span: Option<(i32, i32)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub source: String,
    /// Key inside the source table; defaults to the series key.
    #[serde(default)]
    pub key: Option<String>,
    #[serde(default)]
    pub splice: Splice,
}

/// How a lower-precedence source is scaled onto the series built so far.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Splice {
    /// Used as converted.
    #[default]
    None,
    /// Mean ratio over these overlapping years (all shared years if empty).
    Overlap(Vec<i32>),
    /// Ratio between two neighbouring years of non-overlapping sources.
    Adjacent { reference_year: i32, source_year: i32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceRef {
    pub source: String,
    pub key: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioImputeConfig {
    /// Raw reference series; only ratios of it are used, so any unit works.
    pub reference: SourceRef,
    pub anchors: Vec<i32>,
    #[serde(default)]
    pub years: Option<(i32, i32)>,
}

/// Splits a two-way total into its directional series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocationConfig {
    pub total: String,
    pub measure: Measure,
    pub eastbound: String,
    pub westbound: String,
}

impl BuildConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| PanelError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("teu_per_feu", self.teu_per_feu),
            ("tons_per_teu", self.tons_per_teu),
            ("quantity_tons_per_teu", self.quantity_tons_per_teu),
            ("bulk_to_container", self.bulk_to_container),
            ("liner_to_container", self.liner_to_container),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(PanelError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.utilization > 0.0 && self.utilization <= 1.0) {
            return Err(PanelError::OutOfRangeUtilization(self.utilization));
        }
        for (route, miles) in &self.route_miles {
            match miles.miles() {
                Some(m) if m.is_finite() && m > 0.0 => {}
                _ => return Err(PanelError::Config(format!("route_miles for {route} must be positive"))),
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for s in &self.series {
            if !seen.insert((s.key.as_str(), s.measure)) {
                return Err(PanelError::Config(format!(
                    "series ({}, {}) configured twice",
                    s.key,
                    s.measure.as_str()
                )));
            }
            if s.emit && s.key.parse::<SeriesKey>().is_err() {
                return Err(PanelError::Config(format!(
                    "emitted series '{}' is not a route or industry key",
                    s.key
                )));
            }
            if let Some(first) = s.sources.first() {
                if first.splice != Splice::None {
                    return Err(PanelError::Config(format!(
                        "first source of '{}' is the splice reference and cannot itself be spliced",
                        s.key
                    )));
                }
            }
            if let Some((lo, hi)) = s.span {
                if lo > hi {
                    return Err(PanelError::Config(format!("empty span for '{}'", s.key)));
                }
            }
            if let Some(r) = &s.ratio_impute {
                if r.anchors.is_empty() {
                    return Err(PanelError::Config(format!("no anchors for '{}'", s.key)));
                }
            }
        }
        for a in &self.allocations {
            for k in [&a.total, &a.eastbound, &a.westbound] {
                if !seen.contains(&(k.as_str(), a.measure)) {
                    return Err(PanelError::Config(format!(
                        "allocation refers to unconfigured series ({k}, {})",
                        a.measure.as_str()
                    )));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn miles_for(&self, keys: &[&str]) -> Option<f64> {
        keys.iter().find_map(|k| self.route_miles.get(*k)).and_then(RouteMiles::miles)
    }
}
