use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use editwalk_core::{Rational, Scalar};

mod commands;
mod config;
mod output;

use commands::{CliError, Ctx};
use config::{Format, Mode, Overrides, RunConfig};
use output::OutDir;

/// Edit-based Markov chains on subgraphs of a host graph.
#[derive(Parser)]
#[command(name = "editwalk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Cap on enumerated states, edits and flats.
    #[arg(long, global = true)]
    cap_states: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Allow caps above the defaults.
    #[arg(long, global = true)]
    override_caps: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Run the chain and write a trajectory and summary.
    Simulate,
    /// Eigenvalues with multiplicities.
    Spectrum,
    /// Stationary distribution.
    Stationary,
    /// Mixing-time bounds and the exact TV curve.
    Mixing,
    /// Commute times between pairs of states.
    Commute,
    /// State graph in Graphviz DOT.
    ExportDot,
    /// Closed forms against brute-force oracles.
    Verify,
}

fn run<S: Scalar>(command: Command, cfg: &RunConfig) -> Result<(), CliError> {
    let model = commands::build_model::<S>(cfg)?;
    let ctx = Ctx { cfg, out: OutDir::create(&cfg.out)? };
    match command {
        Command::Simulate => commands::simulate(&ctx, &model),
        Command::Spectrum => commands::spectrum(&ctx, &model),
        Command::Stationary => commands::stationary(&ctx, &model),
        Command::Mixing => commands::mixing(&ctx, &model),
        Command::Commute => commands::commute(&ctx, &model),
        Command::ExportDot => commands::export_dot(&ctx, &model),
        Command::Verify => commands::verify(&ctx, &model),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(path) = &cli.config else {
        eprintln!("error: --config is required");
        return ExitCode::from(1);
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return ExitCode::from(1);
        }
    };
    let flags = Overrides {
        seed: cli.seed,
        out: cli.out.clone(),
        mode: cli.mode,
        cap_states: cli.cap_states,
        format: cli.format,
        override_caps: cli.override_caps,
    };
    let cfg = match RunConfig::parse(&text, &flags) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(1);
        }
    };
    let result = match cfg.mode {
        Mode::Rational => run::<Rational>(cli.command, &cfg),
        Mode::Double => run::<f64>(cli.command, &cfg),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
