//! `lcext` command-line entry point.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use lcext_cli::chart_file::parse_chart;
use lcext_cli::commands::Command;
use lcext_cli::config::RunConfig;
use lcext_cli::error::{CliError, CliResult};
use lcext_cli::execute;

/// Analysis harness for L² extension on diagonal snc models.
#[derive(Debug, Parser)]
#[command(name = "lcext", version)]
struct Args {
    /// Command to run.
    #[arg(value_enum)]
    command: Command,
    /// Chart file (TOML).
    #[arg(long)]
    chart: Option<PathBuf>,
    /// Config file (TOML); every key has a default.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report destination; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (does not affect results).
    #[arg(long, env = "LCEXT_THREADS")]
    threads: Option<usize>,
}

fn read(path: &PathBuf) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn run(args: &Args) -> CliResult<()> {
    let chart = match &args.chart {
        Some(p) => Some(parse_chart(&p.display().to_string(), &read(p)?)?),
        None => None,
    };
    let config = match &args.config {
        Some(p) => RunConfig::parse(&p.display().to_string(), &read(p)?)?,
        None => RunConfig::default(),
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::Precondition(
                "--threads must be at least 1".to_string(),
            ));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Precondition(format!("cannot start thread pool: {e}")))?;
    let (text, violation) = pool.install(|| execute(args.command, chart.as_ref(), &config))?;
    match &args.out {
        Some(p) => std::fs::write(p, &text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        })?,
        None => print!("{text}"),
    }
    violation.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lcext: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
