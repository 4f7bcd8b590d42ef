use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "seabreak", version, about = "Structural break analysis of shipping price panels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the canonical panel from raw source tables.
    PanelBuild(PanelBuildArgs),
    /// Estimate breaks, BIC tables and break-date intervals per series.
    Breaks(BreaksArgs),
    /// Summary statistics of a built panel.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct OutDir {
    /// Output directory.
    #[arg(long, env = "SEABREAK_OUT_DIR", default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PanelBuildArgs {
    /// Source CSV file(s): source_id,key,year,value,unit.
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    /// CPI CSV: year,cpi.
    #[arg(long)]
    pub cpi: PathBuf,
    /// Build configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct BreaksArgs {
    /// Panel CSV or generic series CSV with key,year,value columns.
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    /// Analysis configuration (JSON); flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub min_len: Option<usize>,
    #[arg(long)]
    pub max_m: Option<usize>,
    #[arg(long)]
    pub level: Option<f64>,
    /// Inclusive period range, e.g. 1968-2008.
    #[arg(long)]
    pub window: Option<Window>,
    /// Series to analyse (key or key@unit); all when omitted.
    #[arg(long)]
    pub series: Vec<String>,
    /// auto, andrews, or a fixed number of lags.
    #[arg(long)]
    pub bandwidth: Option<BandwidthArg>,
    /// Regressor moments may differ across regimes.
    #[arg(long, overrides_with = "no_het_reg")]
    pub het_reg: bool,
    #[arg(long, overrides_with = "het_reg")]
    pub no_het_reg: bool,
    /// Error variances may differ across regimes.
    #[arg(long, overrides_with = "no_het_err")]
    pub het_err: bool,
    #[arg(long, overrides_with = "het_err")]
    pub no_het_err: bool,
    #[command(flatten)]
    pub out: OutDir,
}

impl BreaksArgs {
    pub fn het_reg(&self) -> Option<bool> {
        flag_pair(self.het_reg, self.no_het_reg)
    }

    pub fn het_err(&self) -> Option<bool> {
        flag_pair(self.het_err, self.no_het_err)
    }
}

fn flag_pair(on: bool, off: bool) -> Option<bool> {
    match (on, off) {
        (true, _) => Some(true),
        (_, true) => Some(false),
        _ => None,
    }
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Panel CSV: key,year,value,unit,provenance.
    #[arg(long)]
    pub input: PathBuf,
    /// Restrict to these series keys.
    #[arg(long)]
    pub series: Vec<String>,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window(pub i64, pub i64);

impl FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once('-')
            .ok_or_else(|| format!("expected FIRST-LAST, got '{s}'"))?;
        let a: i64 = a.trim().parse().map_err(|e| format!("bad window start: {e}"))?;
        let b: i64 = b.trim().parse().map_err(|e| format!("bad window end: {e}"))?;
        if a > b {
            return Err(format!("empty window {a}-{b}"));
        }
        Ok(Window(a, b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandwidthArg(pub seabreak::Bandwidth);

impl FromStr for BandwidthArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        use seabreak::Bandwidth;
        match s {
            "auto" => Ok(Self(Bandwidth::Auto)),
            "andrews" => Ok(Self(Bandwidth::Andrews)),
            lags => lags
                .parse()
                .map(|l| Self(Bandwidth::Fixed(l)))
                .map_err(|_| format!("bandwidth must be auto, andrews or a lag count, got '{s}'")),
        }
    }
}
