use anyhow::anyhow;
use seabreak::panel::io::{panel_to_csv, read_config, read_cpi, read_sources};
use seabreak::panel::{build_panel, PanelError};

use crate::args::PanelBuildArgs;
use crate::output::write_atomic;
use crate::{config_err, data_err, CmdResult, Completion, Failure};

fn classify(e: PanelError) -> Failure {
    match e {
        PanelError::Config(_) | PanelError::OutOfRangeUtilization(_) => config_err(e),
        other => data_err(other),
    }
}

pub fn run(args: &PanelBuildArgs) -> CmdResult {
    let config = read_config(&args.config).map_err(classify)?;
    let cpi = read_cpi(&args.cpi, config.cpi_base_year).map_err(classify)?;
    let mut sources = Vec::new();
    for path in &args.input {
        sources.extend(read_sources(path).map_err(classify)?);
    }
    let mut ids: Vec<&str> = sources.iter().map(|s| s.source_id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(data_err(anyhow!("source '{}' appears in more than one input file", w[0])));
    }

    let built = build_panel(&sources, &cpi, &config).map_err(classify)?;
    let out = &args.out.out;
    write_atomic(&out.join("panel.csv"), panel_to_csv(&built.rows).as_bytes()).map_err(data_err)?;
    let mut log = built.log.to_json_pretty();
    log.push('\n');
    write_atomic(&out.join("build_log.json"), log.as_bytes()).map_err(data_err)?;
    eprintln!(
        "wrote {} panel rows and {} log entries to {}",
        built.rows.len(),
        built.log.len(),
        out.display()
    );
    Ok(Completion { partial: false })
}
