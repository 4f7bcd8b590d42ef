use anyhow::anyhow;
use seabreak::panel::io::read_panel;
use seabreak::panel::{summarize_panel, PanelError, SeriesKey};

use crate::args::StatsArgs;
use crate::output::{csv_bytes, write_atomic};
use crate::{config_err, data_err, CmdResult, Completion};

pub fn run(args: &StatsArgs) -> CmdResult {
    let keys = args
        .series
        .iter()
        .map(|s| s.parse::<SeriesKey>().map_err(|e| config_err(anyhow!(e))))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = read_panel(&args.input).map_err(|e| match e {
        PanelError::Config(_) => config_err(e),
        other => data_err(other),
    })?;
    let selected: Vec<_> = rows
        .into_iter()
        .filter(|r| keys.is_empty() || keys.contains(&r.key))
        .collect();
    let table = summarize_panel(&selected);
    if table.is_empty() {
        eprintln!("warning: selection has no group with at least two observations");
    }
    let bytes = csv_bytes(
        &["group", "n", "mean", "sd", "min", "max"],
        table.into_iter().map(|(group, s)| {
            vec![
                group,
                s.n.to_string(),
                s.mean.to_string(),
                s.sd.to_string(),
                s.min.to_string(),
                s.max.to_string(),
            ]
        }),
    );
    write_atomic(&args.out.out.join("stats.csv"), &bytes).map_err(data_err)?;
    Ok(Completion { partial: false })
}
