use std::path::{Path, PathBuf};

use seabreak::panel::io::{panel_as_sources, panel_to_csv, read_config, read_cpi, read_sources};
use seabreak::panel::{build_panel, BuildConfig, LogEvent, PanelBuild, Provenance};

fn toy_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/toy")
}

fn build_toy() -> PanelBuild {
    let dir = toy_dir();
    let sources = read_sources(&dir.join("sources.csv")).unwrap();
    let cpi = read_cpi(&dir.join("cpi.csv"), 1995).unwrap();
    let config = read_config(&dir.join("config.json")).unwrap();
    build_panel(&sources, &cpi, &config).unwrap()
}

#[test]
fn toy_fixture_matches_golden_file() {
    let golden = std::fs::read_to_string(toy_dir().join("panel.golden.csv")).unwrap();
    assert_eq!(panel_to_csv(&build_toy().rows), golden);
}

#[test]
fn toy_build_is_deterministic() {
    let a = build_toy();
    let b = build_toy();
    assert_eq!(panel_to_csv(&a.rows), panel_to_csv(&b.rows));
    assert_eq!(a.log.to_json_pretty(), b.log.to_json_pretty());
}

#[test]
fn toy_log_records_factor_and_fills() {
    let out = build_toy();
    let splice = out
        .log
        .entries
        .iter()
        .find_map(|e| match &e.event {
            LogEvent::Splice { factor, years, .. } => Some((*factor, years.clone())),
            _ => None,
        })
        .unwrap();
    assert_eq!(splice, (2.0, vec![1994]));
    let fills = out
        .log
        .entries
        .iter()
        .filter(|e| matches!(e.event, LogEvent::Fill { .. }))
        .count();
    let imputed = out
        .rows
        .iter()
        .filter(|r| r.provenance != Provenance::Observed)
        .count();
    assert_eq!(fills, imputed);
    let keys: Vec<_> = out
        .log
        .entries
        .iter()
        .map(|e| (e.key.clone(), e.measure, e.year))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

/// Feeds a finished panel back in as constant-dollar sources.
fn rebuild(first: &PanelBuild) -> PanelBuild {
    let mut series = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for r in &first.rows {
        if seen.insert((r.key, r.measure())) {
            let source = if r.measure() == seabreak::panel::Measure::Price {
                "panel_price"
            } else {
                "panel_quantity"
            };
            series.push(serde_json::json!({
                "key": r.key.as_str(),
                "measure": r.measure().as_str(),
                "sources": [{"source": source}],
            }));
        }
    }
    let config = BuildConfig::from_json(&serde_json::json!({ "series": series }).to_string()).unwrap();
    let cpi = read_cpi(&toy_dir().join("cpi.csv"), 1995).unwrap();
    build_panel(&panel_as_sources(&first.rows), &cpi, &config).unwrap()
}

#[test]
fn rebuilding_a_complete_panel_changes_nothing() {
    let first = build_toy();
    let second = rebuild(&first);
    assert_eq!(second.rows.len(), first.rows.len());
    for (a, b) in first.rows.iter().zip(&second.rows) {
        assert_eq!((a.key, a.year, a.value, a.unit), (b.key, b.year, b.value, b.unit));
        assert_eq!(b.provenance, Provenance::Observed);
    }
    assert!(second.log.is_empty());
}

#[test]
fn missing_cpi_year_is_reported_per_cell() {
    let dir = toy_dir();
    let sources = read_sources(&dir.join("sources.csv")).unwrap();
    let cpi = seabreak::panel::CpiTable::new(
        [(1994, 100.0), (1995, 100.0), (1996, 125.0), (1997, 125.0)].into_iter().collect(),
        1995,
    )
    .unwrap();
    let config = read_config(&dir.join("config.json")).unwrap();
    match build_panel(&sources, &cpi, &config) {
        Err(seabreak::panel::PanelError::Cells(cells)) => {
            let years: Vec<_> = cells.iter().map(|c| c.year).collect();
            assert_eq!(years, vec![Some(1992), Some(1993)]);
            assert!(cells.iter().all(|c| c.source == "cpi" && c.key == "transpacific_eb"));
        }
        other => panic!("unexpected {other:?}"),
    }
}
