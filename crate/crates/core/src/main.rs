use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use catsim::scenario::{override_truncation, run_scenario, run_sweep, ScenarioConfig, CONFIG_SCHEMA};
use catsim::Error;

/// Driven-dissipative cat-state simulator.
#[derive(Parser, Debug)]
#[command(name = "catsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output directory (overrides `output_dir` in the config).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Parallel sweep points.
    #[arg(long, global = true, value_name = "K")]
    workers: Option<usize>,

    /// Truncation override, `N` or `N,M`.
    #[arg(long, global = true, value_name = "N[,M]")]
    truncation: Option<String>,

    /// Only report errors.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one scenario.
    Run { config: PathBuf },
    /// Run the sweep block of a scenario.
    Sweep { config: PathBuf },
    /// Check a config without running it.
    Validate { config: PathBuf },
    /// Print the config JSON schema.
    Schema,
}

const EXIT_VALIDATION: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;

fn exit_code(e: &Error) -> ExitCode {
    if e.is_numerical() {
        ExitCode::from(EXIT_NUMERICAL)
    } else {
        ExitCode::from(EXIT_VALIDATION)
    }
}

fn load(path: &Path, truncation: Option<&str>) -> catsim::Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut cfg = ScenarioConfig::from_json(&text)?;
    if let Some(t) = truncation {
        override_truncation(&mut cfg, t)?;
    }
    Ok(cfg)
}

fn out_dir(cli: &Cli, cfg: &ScenarioConfig) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out").join(&cfg.name))
}

fn run(cli: &Cli) -> catsim::Result<()> {
    match &cli.command {
        Command::Schema => {
            print!("{CONFIG_SCHEMA}");
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = load(config, cli.truncation.as_deref())?;
            if cfg.sweep.is_some() {
                catsim::scenario::sweep_points(&cfg)?;
            }
            println!("{}: ok", config.display());
            Ok(())
        }
        Command::Run { config } => {
            let cfg = load(config, cli.truncation.as_deref())?;
            let dir = out_dir(cli, &cfg);
            let outcome = run_scenario(&cfg, &dir)?;
            log::info!("wrote {} files to {}", outcome.files.len(), dir.display());
            Ok(())
        }
        Command::Sweep { config } => {
            let cfg = load(config, cli.truncation.as_deref())?;
            let dir = out_dir(cli, &cfg);
            let outcome = run_sweep(&cfg, &dir, cli.workers)?;
            log::info!("{} sweep points written to {}", outcome.rows.len(), dir.join("sweep.csv").display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
