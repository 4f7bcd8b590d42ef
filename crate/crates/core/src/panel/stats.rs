use serde::{Deserialize, Serialize};

use super::{Measure, PanelError, PanelRow, Result, SeriesKey};

/// Count, mean, sample standard deviation, minimum and maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

pub fn summary_stats(values: &[f64]) -> Result<SummaryStats> {
    let n = values.len();
    if n < 2 {
        return Err(PanelError::TooFewObservations { needed: 2, found: n });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    Ok(SummaryStats {
        n,
        mean,
        sd: (ss / (n - 1) as f64).sqrt(),
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Summary table grouped as: route prices, route quantities, then each
/// industry price series. Groups with fewer than two rows are left out.
pub fn summarize_panel(rows: &[PanelRow]) -> Vec<(String, SummaryStats)> {
    let mut groups: Vec<(String, Vec<f64>)> = vec![
        ("route_price".into(), Vec::new()),
        ("route_quantity".into(), Vec::new()),
    ];
    for k in SeriesKey::INDUSTRY {
        groups.push((k.as_str().to_string(), Vec::new()));
    }
    for r in rows {
        let idx = match (r.key.is_route(), r.measure()) {
            (true, Measure::Price) => 0,
            (true, Measure::Quantity) => 1,
            (false, Measure::Price) => {
                2 + SeriesKey::INDUSTRY.iter().position(|k| *k == r.key).expect("industry key")
            }
            (false, Measure::Quantity) => continue,
        };
        groups[idx].1.push(r.value);
    }
    groups
        .into_iter()
        .filter_map(|(name, values)| summary_stats(&values).ok().map(|s| (name, s)))
        .collect()
}
