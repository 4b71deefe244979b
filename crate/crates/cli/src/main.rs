mod artifact;
mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use artifact::ArtifactWriter;
use config::ExperimentConfig;
use error::CliError;

#[derive(Parser)]
#[command(name = "frameflow", version, about = "Frame-flow ergodicity experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set transitivity.cocycle.m=4`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Output directory (falls back to `output_dir`, then FRAMEFLOW_OUTPUT_DIR).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Integrate an extension orbit and test fiber equidistribution.
    Simulate,
    /// Estimate the transitivity group and its invariant tensors.
    Transitivity,
    /// Harmonic degree spectrum of a fiber function.
    Harmonics,
    /// Pinching threshold curve.
    Threshold,
    /// Reduction tables and their consistency check.
    Tables,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Transitivity => "transitivity",
            Command::Harmonics => "harmonics",
            Command::Threshold => "threshold",
            Command::Tables => "tables",
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = ExperimentConfig::load(cli.config.as_deref(), &cli.overrides)?;
    if cli.workers.is_some() {
        cfg.workers = cli.workers;
    }
    if let Some(w) = cfg.workers {
        if w == 0 {
            return Err(CliError::Config("workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global().map_err(|e| CliError::Config(e.to_string()))?;
    }
    let dir = cfg.resolve_output_dir(cli.out.as_deref());
    let mut out = ArtifactWriter::new(&dir, cfg.hash(), cli.command.name())?;
    let summary = match cli.command {
        Command::Simulate => commands::simulate(&cfg, &mut out),
        Command::Transitivity => commands::transitivity(&cfg, &mut out),
        Command::Harmonics => commands::harmonics(&cfg, &mut out),
        Command::Threshold => commands::threshold(&cfg, &mut out),
        Command::Tables => commands::tables(&cfg, &mut out),
    };
    for p in out.written() {
        println!("wrote {}", p.display());
    }
    println!("{}", summary?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("frameflow: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
