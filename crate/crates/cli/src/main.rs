//! Command-line front end for the spin-chain coherence toolkit.

mod commands;
mod config;
mod error;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "mqcoh",
    about = "Coherence-order dynamics, transfer and state restoring in spin-1/2 XX chains",
    version
)]
struct Cli {
    /// Flat keyed configuration file (TOML); defaults reproduce the
    /// published N=20, b=10 run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Random seed override for optimizer runs.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format where a choice exists.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Coherence report of a state file: intensities, purity, physicality.
    Analyze {
        /// Density-matrix JSON file.
        state: PathBuf,
    },
    /// Rank bounds and maximal coherence intensities for N = 2..5.
    Table1,
    /// Evolve a state file under the XX chain for a fixed time.
    Evolve {
        /// Density-matrix JSON file.
        state: PathBuf,
        /// Evolution time in units of 1/d.
        #[arg(long)]
        t: f64,
    },
    /// Extract the sender-to-receiver transfer map at the configured time.
    TransferMap,
    /// Optimize restoring phases that zero the alpha_34 coefficient.
    Restore,
    /// Full reproduction of the published N=20 run with pass/fail checks.
    PaperRun,
    /// Time scan emitting Dt, |alpha_14;14| and the predicted I2 at the receiver.
    Scan,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let config = RunConfig::load(cli.config.as_deref(), cli.seed)?;
    let out = cli.out.as_deref();
    let csv = cli.format == Format::Csv;
    match &cli.command {
        Command::Analyze { state } => commands::analyze(state, out, csv),
        Command::Table1 => commands::table1(out, csv),
        Command::Evolve { state, t } => commands::evolve(state, *t, &config, out),
        Command::TransferMap => commands::transfer_map(&config, out),
        Command::Restore => commands::restore(&config, out),
        Command::PaperRun => commands::paper_run(&config, out),
        Command::Scan => commands::scan(&config, out),
    }
}
