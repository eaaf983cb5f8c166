//! `erqt` — steady-state currents through extended-reservoir junctions.
//!
//! Exit codes: 0 success, 1 at least one result row errored, 2 configuration
//! or I/O problems.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use erqt_cli::config::{dump_config, parse_config, ScenarioConfig};
use erqt_cli::output::emit_csv;
use erqt_cli::runner::{has_errors, run_scenario};

#[derive(Parser)]
#[command(
    name = "erqt",
    version,
    about = "Steady-state electronic transport through junctions with finite, damped reservoirs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its CSV results.
    Run {
        /// Path to the TOML scenario.
        config: PathBuf,
        /// Override the output path from the config.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Worker threads for sweep points (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Print the normalized config (defaults applied) and exit.
        #[arg(long)]
        dump_normalized_config: bool,
    },
    /// Parse and validate a scenario file without running it.
    Validate {
        /// Path to the TOML scenario.
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            config,
            output,
            threads,
            dump_normalized_config,
        } => run_command(&config, output.as_deref(), threads, dump_normalized_config),
        Command::Validate { config } => validate_command(&config),
    }
}

fn load_config(path: &Path) -> Result<ScenarioConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_config(&text)
}

fn run_command(
    config_path: &Path,
    output_override: Option<&Path>,
    threads: Option<usize>,
    dump: bool,
) -> ExitCode {
    let config = match load_config(config_path) {
        Ok(config) => config,
        Err(message) => {
            eprintln!("erqt: config error: {message}");
            return ExitCode::from(2);
        }
    };
    if dump {
        match dump_config(&config) {
            Ok(text) => {
                print!("{text}");
                return ExitCode::SUCCESS;
            }
            Err(message) => {
                eprintln!("erqt: config error: {message}");
                return ExitCode::from(2);
            }
        }
    }
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("erqt: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let rows = match run_scenario(&config) {
        Ok(rows) => rows,
        Err(message) => {
            eprintln!("erqt: config error: {message}");
            return ExitCode::from(2);
        }
    };
    let out_path = output_override
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(&config.output.path));
    if let Err(message) = emit_csv(&rows, &out_path) {
        eprintln!("erqt: {message}");
        return ExitCode::from(2);
    }
    let errored = rows.iter().filter(|r| r.errored).count();
    eprintln!(
        "erqt: scenario {} wrote {} rows to {} ({} errored)",
        config.scenario,
        rows.len(),
        out_path.display(),
        errored
    );
    if has_errors(&rows) {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn validate_command(config_path: &Path) -> ExitCode {
    match load_config(config_path) {
        Ok(config) => {
            eprintln!(
                "erqt: {} is valid (scenario {})",
                config_path.display(),
                config.scenario
            );
            ExitCode::SUCCESS
        }
        Err(message) => {
            eprintln!("erqt: config error: {message}");
            ExitCode::from(2)
        }
    }
}
