//! CSV and JSON readers and writers for panel inputs and outputs.
//!
//! Sources: `source_id,key,year,value,unit` (one unit per source id).
//! CPI: `year,cpi`. Panel: `key,year,value,unit,provenance`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{
    BuildConfig, CpiTable, PanelError, PanelRow, Provenance, RawSourceTable, Result, SeriesKey,
    Unit,
};

pub const SOURCE_HEADER: [&str; 5] = ["source_id", "key", "year", "value", "unit"];
pub const CPI_HEADER: [&str; 2] = ["year", "cpi"];
pub const PANEL_HEADER: [&str; 5] = ["key", "year", "value", "unit", "provenance"];

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| PanelError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

struct Table<R: Read> {
    file: String,
    reader: csv::Reader<R>,
    columns: Vec<usize>,
}

impl<R: Read> Table<R> {
    fn new(input: R, file: &str, header: &[&str]) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let found = reader.headers().map_err(|e| PanelError::Schema {
            file: file.to_string(),
            line: 1,
            message: e.to_string(),
        })?;
        let columns = header
            .iter()
            .map(|name| {
                found.iter().position(|h| h == *name).ok_or_else(|| PanelError::Schema {
                    file: file.to_string(),
                    line: 1,
                    message: format!("missing column '{name}' (expected {})", header.join(",")),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            file: file.to_string(),
            reader,
            columns,
        })
    }

    fn error(&self, line: u64, message: impl Into<String>) -> PanelError {
        PanelError::Schema {
            file: self.file.clone(),
            line,
            message: message.into(),
        }
    }

    /// Calls `f(line, fields)` for each record, fields in header order.
    fn for_each(mut self, mut f: impl FnMut(&Self, u64, Vec<&str>) -> Result<()>) -> Result<()> {
        let mut record = csv::StringRecord::new();
        loop {
            match self.reader.read_record(&mut record) {
                Ok(false) => return Ok(()),
                Ok(true) => {
                    let line = record.position().map_or(0, |p| p.line());
                    let fields = self
                        .columns
                        .iter()
                        .map(|&c| record.get(c).unwrap_or(""))
                        .collect();
                    f(&self, line, fields)?;
                }
                Err(e) => {
                    let line = e.position().map_or(0, |p| p.line());
                    return Err(self.error(line, e.to_string()));
                }
            }
        }
    }

    fn parse<T: std::str::FromStr>(&self, line: u64, what: &str, text: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        text.parse::<T>()
            .map_err(|e| self.error(line, format!("bad {what} '{text}': {e}")))
    }

    fn number(&self, line: u64, what: &str, text: &str) -> Result<f64> {
        let v: f64 = self.parse(line, what, text)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.error(line, format!("{what} must be finite")))
        }
    }
}

/// Source tables in order of first appearance.
pub fn parse_sources<R: Read>(input: R, file: &str) -> Result<Vec<RawSourceTable>> {
    let table = Table::new(input, file, &SOURCE_HEADER)?;
    let mut tables: Vec<RawSourceTable> = Vec::new();
    table.for_each(|t, line, f| {
        let unit: Unit = t.parse(line, "unit", f[4])?;
        let year: i32 = t.parse(line, "year", f[2])?;
        let value = t.number(line, "value", f[3])?;
        if f[0].is_empty() || f[1].is_empty() {
            return Err(t.error(line, "empty source_id or key"));
        }
        let idx = match tables.iter().position(|s| s.source_id == f[0]) {
            Some(i) => i,
            None => {
                tables.push(RawSourceTable::new(f[0], unit));
                tables.len() - 1
            }
        };
        let src = &mut tables[idx];
        if src.unit != unit {
            return Err(t.error(
                line,
                format!("source '{}' mixes units {} and {unit}", src.source_id, src.unit),
            ));
        }
        src.insert(f[1], year, value).map_err(|e| t.error(line, e.to_string()))
    })?;
    Ok(tables)
}

pub fn read_sources(path: &Path) -> Result<Vec<RawSourceTable>> {
    parse_sources(open(path)?, &path.display().to_string())
}

pub fn parse_cpi<R: Read>(input: R, file: &str, base_year: i32) -> Result<CpiTable> {
    let table = Table::new(input, file, &CPI_HEADER)?;
    let mut levels = BTreeMap::new();
    table.for_each(|t, line, f| {
        let year: i32 = t.parse(line, "year", f[0])?;
        let level = t.number(line, "cpi", f[1])?;
        if levels.insert(year, level).is_some() {
            return Err(t.error(line, format!("duplicate year {year}")));
        }
        Ok(())
    })?;
    CpiTable::new(levels, base_year)
}

pub fn read_cpi(path: &Path, base_year: i32) -> Result<CpiTable> {
    parse_cpi(open(path)?, &path.display().to_string(), base_year)
}

pub fn read_config(path: &Path) -> Result<BuildConfig> {
    let mut text = String::new();
    open(path)?
        .read_to_string(&mut text)
        .map_err(|e| PanelError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    BuildConfig::from_json(&text).map_err(|e| match e {
        PanelError::Config(m) => PanelError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn write_panel<W: Write>(rows: &[PanelRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PANEL_HEADER)?;
    for r in rows {
        w.write_record([
            r.key.as_str(),
            &r.year.to_string(),
            &r.value.to_string(),
            r.unit.as_str(),
            r.provenance.as_str(),
        ])?;
    }
    w.flush()
}

pub fn panel_to_csv(rows: &[PanelRow]) -> String {
    let mut buf = Vec::new();
    write_panel(rows, &mut buf).expect("in-memory write");
    String::from_utf8(buf).expect("utf-8")
}

pub fn parse_panel<R: Read>(input: R, file: &str) -> Result<Vec<PanelRow>> {
    let table = Table::new(input, file, &PANEL_HEADER)?;
    let mut rows = Vec::new();
    table.for_each(|t, line, f| {
        let key: SeriesKey = t.parse(line, "key", f[0])?;
        let unit: Unit = t.parse(line, "unit", f[3])?;
        if !unit.is_canonical() {
            return Err(t.error(line, format!("panel unit must be canonical, got {unit}")));
        }
        rows.push(PanelRow {
            key,
            year: t.parse(line, "year", f[1])?,
            value: t.number(line, "value", f[2])?,
            unit,
            provenance: t.parse::<Provenance>(line, "provenance", f[4])?,
        });
        Ok(())
    })?;
    Ok(rows)
}

pub fn read_panel(path: &Path) -> Result<Vec<PanelRow>> {
    parse_panel(open(path)?, &path.display().to_string())
}

/// Re-expresses a finished panel as two canonical-unit sources,
/// `panel_price` and `panel_quantity`.
pub fn panel_as_sources(rows: &[PanelRow]) -> Vec<RawSourceTable> {
    let mut price = RawSourceTable::new("panel_price", Unit::Usd1995PerTeu);
    let mut quantity = RawSourceTable::new("panel_quantity", Unit::MillionTeu);
    for r in rows {
        let t = if r.unit == Unit::MillionTeu {
            &mut quantity
        } else {
            &mut price
        };
        t.cells.insert((r.key.as_str().to_string(), r.year), r.value);
    }
    vec![price, quantity]
}
