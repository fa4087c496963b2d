//! Config-driven harness around the `lcext` analysis crate.
//!
//! A run reads a chart file and an optional config file, executes one
//! command, and writes a CSV table preceded by a `#` comment block holding
//! the tool version, the command and a SHA-256 hash of the canonicalised
//! inputs.  Output bytes depend only on those inputs: summation orders are
//! fixed, floats use shortest round-trip formatting, and nothing
//! time-dependent is written.

pub mod chart_file;
pub mod commands;
pub mod config;
pub mod error;

use sha2::{Digest, Sha256};

use crate::chart_file::{write_chart, ChartData};
use crate::commands::{Command, Table};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

/// Tool version recorded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// SHA-256 (hex) of the command, the canonical config and the canonical
/// chart.  Output path and thread count are deliberately excluded.
pub fn config_hash(command: Command, chart: Option<&ChartData>, config: &RunConfig) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("command = {}\n", command.name()).as_bytes());
    hasher.update(config.canonical().as_bytes());
    hasher.update(b"\n");
    if let Some(data) = chart {
        hasher.update(write_chart(data).as_bytes());
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Renders a table as commented CSV.
pub fn render(
    command: Command,
    chart: Option<&ChartData>,
    config: &RunConfig,
    table: &Table,
) -> CliResult<String> {
    let mut out = String::new();
    out.push_str(&format!("# lcext {VERSION}\n"));
    out.push_str(&format!("# command: {}\n", command.name()));
    out.push_str(&format!(
        "# config-sha256: {}\n",
        config_hash(command, chart, config)
    ));
    for line in &table.comments {
        out.push_str(&format!("# {line}\n"));
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Numeric(format!("CSV encoding failed: {e}"));
    writer.write_record(&table.header).map_err(csv_err)?;
    for row in &table.rows {
        writer.write_record(row).map_err(csv_err)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::Numeric(format!("CSV encoding failed: {e}")))?;
    out.push_str(&String::from_utf8(bytes).expect("CSV of UTF-8 fields is UTF-8"));
    Ok(out)
}

/// Runs `command` and renders the report.  A violated inequality yields
/// the report together with the [`CliError::Violation`] to be raised after
/// writing it.
pub fn execute(
    command: Command,
    chart: Option<&ChartData>,
    config: &RunConfig,
) -> CliResult<(String, Option<CliError>)> {
    let table = commands::run(command, chart, config)?;
    let text = render(command, chart, config, &table)?;
    Ok((text, table.violation.map(CliError::Violation)))
}
