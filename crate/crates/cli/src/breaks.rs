use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use serde::Deserialize;
use seabreak::inference::IntervalStatus;
use seabreak::{analyze_series, AnalysisOptions, Bandwidth, BreakReport, TimeSeries};

use crate::args::BreaksArgs;
use crate::output::{csv_bytes, opt, write_atomic};
use crate::{config_err, data_err, CmdResult, Completion, Failure};

/// Analysis settings read from `--config`; every field is optional and
/// command-line flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalysisFile {
    min_len: Option<usize>,
    max_m: Option<usize>,
    level: Option<f64>,
    het_regressors: Option<bool>,
    het_errors: Option<bool>,
    window: Option<(i64, i64)>,
    series: Option<Vec<String>>,
    bandwidth: Option<Bandwidth>,
}

fn load_file(path: Option<&Path>) -> Result<AnalysisFile, Failure> {
    let Some(path) = path else {
        return Ok(AnalysisFile::default());
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(config_err)?;
    serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(config_err)
}

fn options(args: &BreaksArgs, file: &AnalysisFile) -> Result<AnalysisOptions, Failure> {
    let mut o = AnalysisOptions::default();
    if let Some(v) = args.min_len.or(file.min_len) {
        o.min_len = v;
    }
    if let Some(v) = args.max_m.or(file.max_m) {
        o.max_m = v;
    }
    if let Some(v) = args.level.or(file.level) {
        o.level = v;
    }
    if let Some(v) = args.het_reg().or(file.het_regressors) {
        o.heterogeneity.regressors = v;
    }
    if let Some(v) = args.het_err().or(file.het_errors) {
        o.heterogeneity.errors = v;
    }
    if let Some(b) = args.bandwidth.map(|b| b.0).or(file.bandwidth) {
        o.bandwidth = b;
    }
    o.window = args.window.map(|w| (w.0, w.1)).or(file.window);
    o.validate().map_err(config_err)?;
    Ok(o)
}

/// (year, value, CSV line) triples.
type Points = Vec<(i64, f64, u64)>;

/// Observations of one (key, unit) pair.
struct RawSeries {
    id: String,
    key: String,
    points: Points,
    file: String,
}

/// Reads `key,year,value[,unit]` rows; any other columns are ignored.
fn read_series(paths: &[PathBuf]) -> anyhow::Result<Vec<RawSeries>> {
    let mut grouped: BTreeMap<(String, String), (Points, String)> = BTreeMap::new();
    for path in paths {
        let name = path.display().to_string();
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .with_context(|| format!("reading {name}"))?;
        let headers = reader.headers().with_context(|| format!("{name}:1"))?.clone();
        let col = |c: &str| headers.iter().position(|h| h == c);
        let (Some(k), Some(y), Some(v)) = (col("key"), col("year"), col("value")) else {
            bail!("{name}:1: expected columns key,year,value");
        };
        let u = col("unit");
        for record in reader.records() {
            let record = record.with_context(|| format!("reading {name}"))?;
            let line = record.position().map_or(0, |p| p.line());
            let field = |i: usize| record.get(i).unwrap_or("");
            let year: i64 = field(y)
                .parse()
                .map_err(|e| anyhow!("{name}:{line}: bad year '{}': {e}", field(y)))?;
            let value: f64 = field(v)
                .parse()
                .map_err(|e| anyhow!("{name}:{line}: bad value '{}': {e}", field(v)))?;
            if !value.is_finite() {
                bail!("{name}:{line}: value must be finite");
            }
            let unit = u.map(field).unwrap_or("").to_string();
            grouped
                .entry((field(k).to_string(), unit))
                .or_insert_with(|| (Vec::new(), name.clone()))
                .0
                .push((year, value, line));
        }
    }
    let mut units_per_key: BTreeMap<&str, usize> = BTreeMap::new();
    for (key, _) in grouped.keys() {
        *units_per_key.entry(key).or_default() += 1;
    }
    let ambiguous: Vec<String> = units_per_key
        .into_iter()
        .filter(|(_, n)| *n > 1)
        .map(|(k, _)| k.to_string())
        .collect();
    Ok(grouped
        .into_iter()
        .map(|((key, unit), (points, file))| RawSeries {
            id: if ambiguous.contains(&key) {
                format!("{key}@{unit}")
            } else {
                key.clone()
            },
            key,
            points,
            file,
        })
        .collect())
}

fn to_series(raw: &RawSeries) -> anyhow::Result<TimeSeries> {
    let mut points = raw.points.clone();
    points.sort_by_key(|p| p.0);
    if let Some(w) = points.windows(2).find(|w| w[0].0 == w[1].0) {
        bail!("{}:{}: year {} repeated for series {}", raw.file, w[1].2, w[1].0, raw.id);
    }
    let (periods, values) = points.iter().map(|p| (p.0, p.1)).unzip();
    TimeSeries::new(raw.id.clone(), periods, values).map_err(anyhow::Error::from)
}

fn dir_name(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_@.".contains(c) { c } else { '_' })
        .collect()
}

fn status_str(s: IntervalStatus) -> &'static str {
    match s {
        IntervalStatus::Ok => "ok",
        IntervalStatus::ZeroShift => "zero_shift",
        IntervalStatus::Unstable => "unstable",
    }
}

fn write_report(dir: &Path, report: &BreakReport) -> anyhow::Result<()> {
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    write_atomic(&dir.join("report.json"), json.as_bytes())?;

    let bic = csv_bytes(
        &["m", "total_ssr", "bic", "feasible", "degenerate", "chosen"],
        report.selection.rows.iter().map(|r| {
            vec![
                r.m.to_string(),
                opt(r.total_ssr),
                opt(r.bic),
                r.feasible.to_string(),
                r.degenerate.to_string(),
                (r.m == report.chosen_m).to_string(),
            ]
        }),
    );
    write_atomic(&dir.join("bic.csv"), &bic)?;

    let breaks = csv_bytes(
        &[
            "break",
            "index",
            "period",
            "lower_index",
            "upper_index",
            "lower_period",
            "upper_period",
            "level",
            "status",
        ],
        report.intervals.iter().enumerate().map(|(i, b)| {
            vec![
                (i + 1).to_string(),
                b.break_index.to_string(),
                b.point_period.to_string(),
                b.lower_index.to_string(),
                b.upper_index.to_string(),
                b.lower_period.to_string(),
                b.upper_period.to_string(),
                b.level.to_string(),
                status_str(b.status).to_string(),
            ]
        }),
    );
    write_atomic(&dir.join("breaks.csv"), &breaks)?;

    let plot = csv_bytes(
        &["period", "observed", "fitted"],
        report
            .plot
            .iter()
            .map(|p| vec![p.period.to_string(), p.observed.to_string(), p.fitted.to_string()]),
    );
    write_atomic(&dir.join("plot.csv"), &plot)
}

struct SummaryLine {
    id: String,
    status: &'static str,
    t_len: Option<usize>,
    chosen_m: Option<usize>,
    breaks: String,
    message: String,
}

pub fn run(args: &BreaksArgs) -> CmdResult {
    let file = load_file(args.config.as_deref())?;
    let opts = options(args, &file)?;
    let selectors: Vec<String> = if args.series.is_empty() {
        file.series.clone().unwrap_or_default()
    } else {
        args.series.clone()
    };

    let all = read_series(&args.input).map_err(data_err)?;
    let mut partial = false;
    for sel in &selectors {
        if !all.iter().any(|s| &s.id == sel || &s.key == sel) {
            eprintln!("warning: no series matches '{sel}'");
            partial = true;
        }
    }
    let chosen: Vec<&RawSeries> = all
        .iter()
        .filter(|s| selectors.is_empty() || selectors.iter().any(|x| x == &s.id || x == &s.key))
        .collect();
    if chosen.is_empty() {
        eprintln!("warning: no series selected");
    }

    let out = &args.out.out;
    let mut summary = Vec::new();
    for raw in chosen {
        let line = |status, t_len, message: String| SummaryLine {
            id: raw.id.clone(),
            status,
            t_len,
            chosen_m: None,
            breaks: String::new(),
            message,
        };
        let series = match to_series(raw) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {}: {e:#}", raw.id);
                summary.push(line("failed", None, format!("{e:#}")));
                partial = true;
                continue;
            }
        };
        let t_len = match opts.window {
            Some((a, b)) => series
                .periods()
                .iter()
                .filter(|p| (a..=b).contains(*p))
                .count(),
            None => series.len(),
        };
        if t_len < 2 * opts.min_len {
            let msg = format!(
                "skipped: {t_len} observations, at least 2 * min_len = {} required",
                2 * opts.min_len
            );
            eprintln!("warning: {}: {msg}", raw.id);
            summary.push(line("skipped", Some(t_len), msg));
            partial = true;
            continue;
        }
        match analyze_series(&series, &opts) {
            Ok(report) => {
                write_report(&out.join(dir_name(&raw.id)), &report).map_err(data_err)?;
                let breaks = report
                    .break_periods
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join(";");
                summary.push(SummaryLine {
                    id: raw.id.clone(),
                    status: "ok",
                    t_len: Some(report.t_len),
                    chosen_m: Some(report.chosen_m),
                    breaks,
                    message: String::new(),
                });
            }
            Err(e) => {
                eprintln!("error: {}: {e}", raw.id);
                summary.push(line("failed", Some(t_len), e.to_string()));
                partial = true;
            }
        }
    }

    let bytes = csv_bytes(
        &["series_id", "status", "t_len", "chosen_m", "break_periods", "message"],
        summary.into_iter().map(|s| {
            vec![
                s.id,
                s.status.to_string(),
                s.t_len.map(|v| v.to_string()).unwrap_or_default(),
                s.chosen_m.map(|v| v.to_string()).unwrap_or_default(),
                s.breaks,
                s.message,
            ]
        }),
    );
    write_atomic(&out.join("summary.csv"), &bytes).map_err(data_err)?;
    Ok(Completion { partial })
}
