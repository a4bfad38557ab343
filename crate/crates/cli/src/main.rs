use clap::{Args, Parser, Subcommand as ClapSubcommand};
use specdiff_cli::config::{parse_config, ConfigError, Subcommand};
use specdiff_cli::{run, CliError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "specdiff", version, about = "Kinetic and macroscopic fractional diffusion experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(ClapSubcommand, Debug)]
enum Command {
    /// Dump the reflection polyline of one trajectory.
    Trace(Common),
    /// Evaluate the specular fractional operator of a test function on a grid.
    Operator(Common),
    /// Sample the equilibrium velocity law: histogram, characteristic function, tail.
    Equilibrium(Common),
    /// Run the particle simulator and record density snapshots.
    Kinetic(Common),
    /// Solve the macroscopic fractional heat equation.
    Macro(Common),
    /// Compare kinetic densities with the macroscopic limit over an eps ladder.
    LimitStudy(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override the `seed` key.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, value_name = "N", env = "SPECDIFF_WORKERS")]
    workers: Option<usize>,
    /// Override the `output_dir` key.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Override any configuration key.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let (sub, common) = match cli.command {
        Command::Trace(c) => (Subcommand::Trace, c),
        Command::Operator(c) => (Subcommand::Operator, c),
        Command::Equilibrium(c) => (Subcommand::Equilibrium, c),
        Command::Kinetic(c) => (Subcommand::Kinetic, c),
        Command::Macro(c) => (Subcommand::Macro, c),
        Command::LimitStudy(c) => (Subcommand::LimitStudy, c),
    };
    let text = match &common.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| ConfigError::Parse {
            field: "--config".into(),
            message: format!("{}: {e}", path.display()),
        })?,
        None => String::new(),
    };
    let mut overrides = Vec::new();
    for kv in &common.set {
        let Some((k, v)) = kv.split_once('=') else {
            return Err(ConfigError::Parse { field: "--set".into(), message: format!("`{kv}` is not KEY=VALUE") }.into());
        };
        overrides.push((k.trim().to_string(), v.trim().to_string()));
    }
    if let Some(seed) = common.seed {
        overrides.push(("seed".into(), seed.to_string()));
    }
    if let Some(out) = &common.out {
        overrides.push(("output_dir".into(), out.display().to_string()));
    }
    let cfg = parse_config(sub, &text, &overrides)?;
    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }
    let workers = match common.workers {
        Some(0) => return Err(ConfigError::Validation { field: "workers".into(), reason: "must be at least 1".into() }.into()),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    // only fails if a pool already exists, which cannot happen here
    let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    for path in run(&cfg, workers)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
