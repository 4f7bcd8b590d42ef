//! The panel pipeline: conversion, splicing, allocation, ratio imputation,
//! interpolation and CPI deflation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::{BuildConfig, SeriesConfig, Splice};
use super::convert::{
    capacity_to_quantity, cpi_adjust, newbuilding_per_teu, scrap_per_teu, secondhand_calibration,
    secondhand_steps, tonmile_rate_to_teu, CalibrationSolution,
};
use super::impute::{
    allocate_directional, calibrate_overlap, fixed_ratio_impute, interpolate_linear, Overlap,
};
use super::{
    CellError, CpiTable, Measure, PanelError, PanelRow, Provenance, RawSourceTable, Result,
    SeriesKey, Unit,
};

/// Vessel prices are quoted in millions of dollars.
const VESSEL_PRICE_SCALE: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum LogEvent {
    SecondhandCalibration {
        depreciation_rate: f64,
        conversion_rate: f64,
        negative_depreciation: bool,
    },
    /// Intermediate values of one secondhand conversion, in the quoted
    /// money unit.
    SecondhandChain {
        source: String,
        raw: f64,
        age_adjusted: f64,
        per_12000dwt: f64,
        per_1200teu: f64,
        per_teu: f64,
        container: f64,
    },
    Splice {
        source: String,
        source_key: String,
        factor: f64,
        years: Vec<i32>,
        adjacent: bool,
        max_discontinuity: f64,
        flagged: bool,
    },
    Allocation {
        total: String,
        reference_year: i32,
        total_value: f64,
        value: f64,
    },
    RatioImpute {
        reference_source: String,
        reference_key: String,
        ratio: f64,
        anchors: Vec<i32>,
    },
    /// A filled cell, valued before CPI deflation.
    Fill { provenance: Provenance, value: f64 },
    CpiDeflate { base_year: i32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub key: String,
    pub measure: Measure,
    pub year: Option<i32>,
    #[serde(flatten)]
    pub event: LogEvent,
}

/// Entries ordered by (key, measure, year); series-level events first.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BuildLog {
    pub entries: Vec<LogEntry>,
}

impl BuildLog {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("log serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelBuild {
    /// Sorted by key, measure, year.
    pub rows: Vec<PanelRow>,
    pub log: BuildLog,
}

type Cells = BTreeMap<i32, (f64, Provenance)>;

#[derive(Default)]
struct SeriesState {
    cells: Cells,
    /// `Some(true)` when every source is already in constant dollars.
    real: Option<bool>,
}

impl SeriesState {
    fn values(&self) -> BTreeMap<i32, f64> {
        self.cells.iter().map(|(y, (v, _))| (*y, *v)).collect()
    }
}

struct Builder<'a> {
    sources: BTreeMap<&'a str, &'a RawSourceTable>,
    config: &'a BuildConfig,
    calibration: CalibrationSolution,
    calibration_logged: bool,
    log: Vec<LogEntry>,
    errors: Vec<CellError>,
}

fn unit_measures(unit: Unit) -> &'static [Measure] {
    match unit {
        Unit::UsdPer100TonMile
        | Unit::UsdPerFeu
        | Unit::UsdPerTeu
        | Unit::UsdPerDwtVessel
        | Unit::UsdPerLtd
        | Unit::Usd1995PerTeu => &[Measure::Price],
        Unit::TeuCapacity | Unit::ThousandTeu | Unit::MillionTon | Unit::MillionTeu => {
            &[Measure::Quantity]
        }
        Unit::Index1995 => &[Measure::Price, Measure::Quantity],
    }
}

fn require(what: &'static str, value: f64, allow_zero: bool) -> Result<f64> {
    let ok = value.is_finite() && (value > 0.0 || (allow_zero && value == 0.0));
    if ok {
        Ok(value)
    } else {
        Err(PanelError::NonPositiveInput { what, value })
    }
}

impl<'a> Builder<'a> {
    fn entry(&mut self, s: &SeriesConfig, year: Option<i32>, event: LogEvent) {
        self.log.push(LogEntry {
            key: s.key.clone(),
            measure: s.measure,
            year,
            event,
        });
    }

    fn cell_error(&mut self, source: &str, key: &str, year: Option<i32>, err: &PanelError) {
        let year = year.or(match err {
            PanelError::MissingCpiYear(y)
            | PanelError::ZeroDenominator(y)
            | PanelError::NoAnchor(y)
            | PanelError::ReferenceGap(y)
            | PanelError::ExtrapolationRequired(y) => Some(*y),
            _ => None,
        });
        self.errors.push(CellError {
            source: source.to_string(),
            key: key.to_string(),
            year,
            message: err.to_string(),
        });
    }

    fn table(&self, id: &str) -> Result<&'a RawSourceTable> {
        self.sources
            .get(id)
            .copied()
            .ok_or_else(|| PanelError::Config(format!("unknown source '{id}'")))
    }

    /// Converts one raw cell to nominal canonical units.
    fn convert(
        &mut self,
        s: &SeriesConfig,
        table: &RawSourceTable,
        source_key: &str,
        year: i32,
        raw: f64,
    ) -> Result<(f64, Provenance)> {
        let cfg = self.config;
        let observed = |v| Ok((v, Provenance::Observed));
        match table.unit {
            Unit::UsdPer100TonMile => {
                let miles = cfg.miles_for(&[source_key, &s.key]).ok_or_else(|| {
                    PanelError::Config(format!("no route_miles for '{source_key}'"))
                })?;
                observed(tonmile_rate_to_teu(raw, miles, cfg.tons_per_teu)?)
            }
            Unit::UsdPerFeu => observed(require("FEU price", raw, false)? / cfg.teu_per_feu),
            Unit::UsdPerTeu => observed(require("TEU price", raw, false)?),
            Unit::Index1995 => observed(require("index", raw, false)?),
            Unit::TeuCapacity => Ok((
                capacity_to_quantity(raw, cfg.utilization)? / 1e6,
                Provenance::CapacityDerived,
            )),
            Unit::ThousandTeu => observed(require("volume", raw, true)? / 1e3),
            Unit::MillionTon => observed(require("volume", raw, true)? / cfg.quantity_tons_per_teu),
            Unit::UsdPerDwtVessel if s.key == SeriesKey::Secondhand.as_str() => {
                if !self.calibration_logged {
                    self.calibration_logged = true;
                    let c = self.calibration;
                    self.entry(
                        s,
                        None,
                        LogEvent::SecondhandCalibration {
                            depreciation_rate: c.depreciation_rate,
                            conversion_rate: c.conversion_rate,
                            negative_depreciation: c.depreciation_rate < 0.0,
                        },
                    );
                }
                let steps = secondhand_steps(raw, &self.calibration, cfg.liner_to_container)?;
                self.entry(
                    s,
                    Some(year),
                    LogEvent::SecondhandChain {
                        source: table.source_id.clone(),
                        raw,
                        age_adjusted: steps.age_adjusted,
                        per_12000dwt: steps.per_12000dwt,
                        per_1200teu: steps.per_1200teu,
                        per_teu: steps.per_teu,
                        container: steps.container,
                    },
                );
                observed(steps.container * VESSEL_PRICE_SCALE)
            }
            Unit::UsdPerDwtVessel => {
                observed(newbuilding_per_teu(raw, cfg.bulk_to_container)? * VESSEL_PRICE_SCALE)
            }
            Unit::UsdPerLtd => observed(scrap_per_teu(raw)?),
            Unit::Usd1995PerTeu => observed(require("price", raw, false)?),
            Unit::MillionTeu => observed(require("volume", raw, true)?),
        }
    }

    /// Converts and splices the configured sources.
    fn assemble(&mut self, s: &SeriesConfig) -> Result<SeriesState> {
        let mut state = SeriesState::default();
        for spec in &s.sources {
            let table = self.table(&spec.source)?;
            if !unit_measures(table.unit).contains(&s.measure) {
                return Err(PanelError::Config(format!(
                    "source '{}' in {} cannot feed {} series '{}'",
                    table.source_id,
                    table.unit,
                    s.measure.as_str(),
                    s.key
                )));
            }
            if table.unit == Unit::Index1995 && spec.splice == Splice::None {
                return Err(PanelError::Config(format!(
                    "index source '{}' must be spliced onto '{}'",
                    table.source_id, s.key
                )));
            }
            let real = table.unit.is_canonical();
            match state.real {
                Some(r) if r != real => {
                    return Err(PanelError::Config(format!(
                        "series '{}' mixes constant-dollar and nominal sources",
                        s.key
                    )))
                }
                _ => state.real = Some(real),
            }

            let source_key = spec.key.clone().unwrap_or_else(|| s.key.clone());
            let mut converted = Cells::new();
            for (year, raw) in table.series(&source_key) {
                match self.convert(s, table, &source_key, year, raw) {
                    Ok(cell) => {
                        converted.insert(year, cell);
                    }
                    Err(e) => self.cell_error(&table.source_id, &source_key, Some(year), &e),
                }
            }

            let overlap = match &spec.splice {
                Splice::None => None,
                Splice::Overlap(years) => Some(Overlap::Years(years.clone())),
                Splice::Adjacent {
                    reference_year,
                    source_year,
                } => Some(Overlap::Adjacent {
                    reference_year: *reference_year,
                    source_year: *source_year,
                }),
            };
            let factor = match overlap {
                None => None,
                Some(overlap) => {
                    let source_values = converted.iter().map(|(y, (v, _))| (*y, *v)).collect();
                    match calibrate_overlap(&state.values(), &source_values, &overlap) {
                        Ok(f) => {
                            self.entry(
                                s,
                                None,
                                LogEvent::Splice {
                                    source: table.source_id.clone(),
                                    source_key: source_key.clone(),
                                    factor: f.factor,
                                    years: f.years.clone(),
                                    adjacent: matches!(overlap, Overlap::Adjacent { .. }),
                                    max_discontinuity: f.max_discontinuity,
                                    flagged: f.flagged,
                                },
                            );
                            Some(f.factor)
                        }
                        Err(e) => {
                            self.cell_error(&table.source_id, &source_key, None, &e);
                            continue;
                        }
                    }
                }
            };
            for (year, (value, provenance)) in converted {
                if state.cells.contains_key(&year) {
                    continue;
                }
                let cell = match factor {
                    Some(f) => {
                        let v = value * f;
                        self.entry(
                            s,
                            Some(year),
                            LogEvent::Fill {
                                provenance: Provenance::Calibrated,
                                value: v,
                            },
                        );
                        (v, Provenance::Calibrated)
                    }
                    None => (value, provenance),
                };
                state.cells.insert(year, cell);
            }
        }
        Ok(state)
    }

    /// Ratio imputation, interpolation, span trimming and deflation.
    fn finish(
        &mut self,
        s: &SeriesConfig,
        mut state: SeriesState,
        cpi: &CpiTable,
    ) -> Result<Vec<PanelRow>> {
        if let Some(r) = &s.ratio_impute {
            let table = self.table(&r.reference.source)?;
            let reference = table.series(&r.reference.key);
            match fixed_ratio_impute(&state.values(), &reference, &r.anchors, r.years) {
                Ok(fill) => {
                    self.entry(
                        s,
                        None,
                        LogEvent::RatioImpute {
                            reference_source: r.reference.source.clone(),
                            reference_key: r.reference.key.clone(),
                            ratio: fill.ratio,
                            anchors: fill.anchors.clone(),
                        },
                    );
                    for (year, value) in fill.filled {
                        self.fill(s, &mut state, year, value, Provenance::RatioImputed);
                    }
                }
                Err(e) => self.cell_error(&r.reference.source, &s.key, None, &e),
            }
        }

        if s.interpolate && (state.cells.len() >= 2 || s.span.is_some()) {
            match interpolate_linear(&state.values(), s.span) {
                Ok(filled) => {
                    for (year, value) in filled {
                        self.fill(s, &mut state, year, value, Provenance::Interpolated);
                    }
                }
                Err(e) => self.cell_error("interpolation", &s.key, None, &e),
            }
        }

        if let Some((lo, hi)) = s.span {
            state.cells.retain(|y, _| (lo..=hi).contains(y));
        }

        let deflate = s.measure == Measure::Price && state.real != Some(true);
        if deflate && !state.cells.is_empty() {
            self.entry(
                s,
                None,
                LogEvent::CpiDeflate {
                    base_year: cpi.base_year(),
                },
            );
        }
        let key: SeriesKey = s
            .key
            .parse()
            .map_err(|e: String| PanelError::Config(e))?;
        let mut rows = Vec::with_capacity(state.cells.len());
        for (year, (value, provenance)) in state.cells {
            let value = if deflate {
                match cpi_adjust(value, year, cpi) {
                    Ok(v) => v,
                    Err(e) => {
                        self.cell_error("cpi", &s.key, Some(year), &e);
                        continue;
                    }
                }
            } else {
                value
            };
            let valid = match s.measure {
                Measure::Price => value.is_finite() && value > 0.0,
                Measure::Quantity => value.is_finite() && value >= 0.0,
            };
            if !valid {
                let e = PanelError::NonPositiveInput {
                    what: "panel value",
                    value,
                };
                self.cell_error("panel", &s.key, Some(year), &e);
                continue;
            }
            rows.push(PanelRow {
                key,
                year,
                value,
                unit: s.measure.canonical_unit(),
                provenance,
            });
        }
        Ok(rows)
    }

    fn fill(
        &mut self,
        s: &SeriesConfig,
        state: &mut SeriesState,
        year: i32,
        value: f64,
        provenance: Provenance,
    ) {
        self.entry(s, Some(year), LogEvent::Fill { provenance, value });
        state.cells.insert(year, (value, provenance));
    }
}

/// Builds the panel from raw source tables.
///
/// Series are first assembled from their sources in precedence order, then
/// two-way totals are allocated to directions, and finally each emitted
/// series is ratio-imputed, interpolated, trimmed to its span and deflated
/// (nominal price series only). Configuration problems fail immediately;
/// failures tied to individual cells are collected and returned together
/// as [`PanelError::Cells`].
pub fn build_panel(
    sources: &[RawSourceTable],
    cpi: &CpiTable,
    config: &BuildConfig,
) -> Result<PanelBuild> {
    config.validate()?;
    let mut by_id = BTreeMap::new();
    for t in sources {
        if by_id.insert(t.source_id.as_str(), t).is_some() {
            return Err(PanelError::Config(format!("source '{}' given twice", t.source_id)));
        }
    }
    let cpi = if cpi.base_year() == config.cpi_base_year {
        cpi.clone()
    } else {
        cpi.with_base_year(config.cpi_base_year)?
    };
    let mut b = Builder {
        sources: by_id,
        config,
        calibration: secondhand_calibration(),
        calibration_logged: false,
        log: Vec::new(),
        errors: Vec::new(),
    };

    let mut states = Vec::with_capacity(config.series.len());
    for s in &config.series {
        states.push(b.assemble(s)?);
    }

    let index_of = |key: &str, measure: Measure| {
        config
            .series
            .iter()
            .position(|s| s.key == key && s.measure == measure)
            .expect("validated")
    };
    for a in &config.allocations {
        let ti = index_of(&a.total, a.measure);
        let ei = index_of(&a.eastbound, a.measure);
        let wi = index_of(&a.westbound, a.measure);
        let total = states[ti].values();
        let result = allocate_directional(&total, &states[ei].values(), &states[wi].values());
        match result {
            Ok(parts) => {
                let total_real = states[ti].real;
                for (idx, east) in [(ei, true), (wi, false)] {
                    match (states[idx].real, total_real) {
                        (Some(r), Some(t)) if r != t => {
                            return Err(PanelError::Config(format!(
                                "allocation of '{}' mixes constant-dollar and nominal series",
                                a.total
                            )))
                        }
                        (None, t) => states[idx].real = t,
                        _ => {}
                    }
                    for p in &parts {
                        let value = if east { p.eastbound } else { p.westbound };
                        b.entry(
                            &config.series[idx],
                            Some(p.year),
                            LogEvent::Allocation {
                                total: a.total.clone(),
                                reference_year: p.reference_year,
                                total_value: total[&p.year],
                                value,
                            },
                        );
                        states[idx].cells.insert(p.year, (value, Provenance::Allocated));
                    }
                }
            }
            Err(e) => b.cell_error("allocation", &a.total, None, &e),
        }
    }

    let mut rows = Vec::new();
    for (s, state) in config.series.iter().zip(states) {
        if s.emit {
            rows.extend(b.finish(s, state, &cpi)?);
        }
    }

    if !b.errors.is_empty() {
        return Err(PanelError::Cells(b.errors));
    }
    rows.sort_by(|x, y| {
        (x.key.as_str(), x.measure(), x.year).cmp(&(y.key.as_str(), y.measure(), y.year))
    });
    let mut entries = b.log;
    entries.sort_by(|x, y| (&x.key, x.measure, x.year).cmp(&(&y.key, y.measure, y.year)));
    Ok(PanelBuild {
        rows,
        log: BuildLog { entries },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cpi() -> CpiTable {
        CpiTable::new((1990..=2000).map(|y| (y, 100.0)).collect(), 1995).unwrap()
    }

    #[test]
    fn empty_everything() {
        let out = build_panel(&[], &cpi(), &BuildConfig::default()).unwrap();
        assert!(out.rows.is_empty());
        assert!(out.log.is_empty());
    }

    #[test]
    fn scrap_conversion_and_deflation() {
        let mut t = RawSourceTable::new("ltd", Unit::UsdPerLtd);
        t.insert("scrap", 1990, 200.0).unwrap();
        t.insert("scrap", 1992, 400.0).unwrap();
        let cfg = BuildConfig::from_json(
            r#"{"series": [{"key": "scrap", "measure": "price", "sources": [{"source": "ltd"}]}]}"#,
        )
        .unwrap();
        let levels = [(1990, 50.0), (1991, 100.0), (1992, 100.0), (1995, 100.0)];
        let cpi = CpiTable::new(levels.into_iter().collect(), 1995).unwrap();
        let out = build_panel(&[t], &cpi, &cfg).unwrap();
        let got: Vec<_> = out.rows.iter().map(|r| (r.year, r.value, r.provenance)).collect();
        assert_eq!(
            got,
            vec![
                (1990, 1000.0, Provenance::Observed),
                (1991, 750.0, Provenance::Interpolated),
                (1992, 1000.0, Provenance::Observed),
            ]
        );
        assert!(out.rows.iter().all(|r| r.unit == Unit::Usd1995PerTeu));
    }

    #[test]
    fn secondhand_logs_negative_depreciation() {
        let mut t = RawSourceTable::new("sh", Unit::UsdPerDwtVessel);
        t.insert("secondhand", 1990, 16.0).unwrap();
        let cfg = BuildConfig::from_json(
            r#"{"series": [{"key": "secondhand", "measure": "price", "sources": [{"source": "sh"}]}]}"#,
        )
        .unwrap();
        let out = build_panel(&[t], &cpi(), &cfg).unwrap();
        assert_eq!(out.rows.len(), 1);
        let flagged = out.log.entries.iter().any(|e| {
            matches!(
                e.event,
                LogEvent::SecondhandCalibration {
                    negative_depreciation: true,
                    ..
                }
            )
        });
        assert!(flagged);
        let chain = out
            .log
            .entries
            .iter()
            .find_map(|e| match &e.event {
                LogEvent::SecondhandChain { container, .. } => Some(*container),
                _ => None,
            })
            .unwrap();
        assert_eq!(out.rows[0].value, chain * 1e6);
    }

    #[test]
    fn allocation_then_emit() {
        let mut q = RawSourceTable::new("q", Unit::MillionTeu);
        q.insert("ta", 1990, 4.0).unwrap();
        q.insert("ta", 1991, 8.0).unwrap();
        q.insert("transatlantic_eb", 1991, 6.0).unwrap();
        q.insert("transatlantic_wb", 1991, 2.0).unwrap();
        let cfg = BuildConfig::from_json(
            r#"{"series": [
                 {"key": "ta", "measure": "quantity", "emit": false, "sources": [{"source": "q"}]},
                 {"key": "transatlantic_eb", "measure": "quantity", "sources": [{"source": "q"}]},
                 {"key": "transatlantic_wb", "measure": "quantity", "sources": [{"source": "q"}]}],
               "allocations": [{"total": "ta", "measure": "quantity",
                                "eastbound": "transatlantic_eb", "westbound": "transatlantic_wb"}]}"#,
        )
        .unwrap();
        let out = build_panel(&[q], &cpi(), &cfg).unwrap();
        let got: Vec<_> = out
            .rows
            .iter()
            .map(|r| (r.key.as_str(), r.year, r.value, r.provenance))
            .collect();
        assert_eq!(
            got,
            vec![
                ("transatlantic_eb", 1990, 3.0, Provenance::Allocated),
                ("transatlantic_eb", 1991, 6.0, Provenance::Observed),
                ("transatlantic_wb", 1990, 1.0, Provenance::Allocated),
                ("transatlantic_wb", 1991, 2.0, Provenance::Observed),
            ]
        );
    }

    #[test]
    fn cell_failures_are_aggregated() {
        let mut t = RawSourceTable::new("ltd", Unit::UsdPerLtd);
        t.insert("scrap", 1980, -1.0).unwrap();
        t.insert("scrap", 1990, 10.0).unwrap();
        t.insert("scrap", 2005, 10.0).unwrap();
        let cfg = BuildConfig::from_json(
            r#"{"series": [{"key": "scrap", "measure": "price", "interpolate": false, "sources": [{"source": "ltd"}]}]}"#,
        )
        .unwrap();
        match build_panel(&[t], &cpi(), &cfg) {
            Err(PanelError::Cells(cells)) => {
                let years: Vec<_> = cells.iter().map(|c| (c.source.as_str(), c.year)).collect();
                assert_eq!(years, vec![("ltd", Some(1980)), ("cpi", Some(2005))]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn log_round_trips() {
        let mut t = RawSourceTable::new("sh", Unit::UsdPerDwtVessel);
        t.insert("secondhand", 1990, 16.0).unwrap();
        t.insert("secondhand", 1992, 20.0).unwrap();
        let cfg = BuildConfig::from_json(
            r#"{"series": [{"key": "secondhand", "measure": "price", "sources": [{"source": "sh"}]}]}"#,
        )
        .unwrap();
        let out = build_panel(&[t], &cpi(), &cfg).unwrap();
        let back: BuildLog = serde_json::from_str(&out.log.to_json_pretty()).unwrap();
        assert_eq!(back, out.log);
    }
}
