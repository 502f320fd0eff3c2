use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spinprobe_cli::config::ExperimentConfig;
use spinprobe_cli::presets::{builtin_presets, preset, PRESET_NAMES};
use spinprobe_cli::{run, RunError};

/// Quantum Fisher information of a qubit probe in an Ising spin bath.
#[derive(Parser)]
#[command(name = "spinprobe", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Override the output path from the config.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a built-in preset.
    Preset {
        name: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List the built-in presets.
    Presets,
    /// Print a preset as a config file.
    DumpPreset { name: String },
}

fn named(name: &str) -> Result<ExperimentConfig, RunError> {
    preset(name).ok_or_else(|| {
        RunError::Config(format!("unknown preset {name:?}; available: {}", PRESET_NAMES.join(", ")))
    })
}

fn dispatch(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Run { config, output } => run(&ExperimentConfig::load(&config)?, output.as_deref()),
        Command::Preset { name, output } => run(&named(&name)?, output.as_deref()),
        Command::Presets => {
            for (name, _) in builtin_presets() {
                println!("{name}");
            }
            Ok(())
        }
        Command::DumpPreset { name } => {
            print!("{}", named(&name)?.to_toml());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spinprobe: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
