use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ompair_cli::config::Config;
use ompair_cli::experiments::{self, RunError};
use ompair_cli::output;

/// Simulations of two coupled optomechanical oscillators: classical
/// synchronization sweeps and steady-state Gaussian observables, comparing
/// separate and common mechanical baths.
#[derive(Parser)]
#[command(name = "ompair", version, about, allow_negative_numbers = true)]
struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads (0 = one per logical CPU).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// RNG seed for random initial conditions.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Draw random initial conditions per sweep cell.
    #[arg(long, global = true)]
    random_ic: bool,

    #[arg(long, global = true)]
    omega_m: Option<f64>,

    #[arg(long, global = true)]
    gamma: Option<f64>,

    #[arg(long, global = true)]
    kc: Option<f64>,

    #[arg(long, global = true)]
    delta0: Option<f64>,

    #[arg(long, global = true)]
    power: Option<f64>,

    #[arg(long, global = true)]
    nth: Option<f64>,

    /// Mechanical bath topology: "sb" or "cb".
    #[arg(long, global = true)]
    bath: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one classical trajectory and export it.
    Trajectory,
    /// Synchronization phase diagram over (detuning, coupling).
    Syncmap,
    /// Minimum synchronizing coupling per detuning.
    Syncthreshold,
    /// Steady-state quantum observables at the base point, both baths.
    Steady,
    /// Quantum observables versus laser detuning, both baths.
    DetuningScan,
    /// Quantum observables versus drive power, both baths.
    PowerScan,
    /// Optimal detuning for entanglement and for cooling, both baths.
    OptimizeDetuning,
    /// Power-optimized observables across mechanical frequencies.
    SidebandScan,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Trajectory => "trajectory",
            Command::Syncmap => "syncmap",
            Command::Syncthreshold => "syncthreshold",
            Command::Steady => "steady",
            Command::DetuningScan => "detuning-scan",
            Command::PowerScan => "power-scan",
            Command::OptimizeDetuning => "optimize-detuning",
            Command::SidebandScan => "sideband-scan",
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<Config, ompair_cli::config::ConfigError> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(v) = cli.omega_m {
        cfg.params.omega_m = v;
    }
    if let Some(v) = cli.gamma {
        cfg.params.gamma = v;
    }
    if let Some(v) = cli.kc {
        cfg.params.kc = v;
    }
    if let Some(v) = cli.delta0 {
        cfg.params.delta0 = v;
    }
    if let Some(v) = cli.power {
        cfg.params.power = v;
    }
    if let Some(v) = cli.nth {
        cfg.params.nth = v;
    }
    if let Some(v) = &cli.bath {
        cfg.params.bath = v.clone();
    }
    if let Some(v) = cli.workers {
        cfg.run.workers = v;
    }
    if let Some(v) = cli.seed {
        cfg.run.seed = v;
    }
    if cli.random_ic {
        cfg.run.random_ic = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = output::ensure_dir(&cli.out) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if let Err(e) = output::write_manifest(&cli.out, cli.command.name(), &cfg) {
        eprintln!("error: {e}");
        return ExitCode::from(3);
    }
    let result = match cli.command {
        Command::Trajectory => experiments::run_trajectory(&cfg, &cli.out),
        Command::Syncmap => experiments::run_syncmap(&cfg, &cli.out),
        Command::Syncthreshold => experiments::run_syncthreshold(&cfg, &cli.out),
        Command::Steady => experiments::run_steady(&cfg, &cli.out),
        Command::DetuningScan => experiments::run_detuning_scan(&cfg, &cli.out),
        Command::PowerScan => experiments::run_power_scan(&cfg, &cli.out),
        Command::OptimizeDetuning => experiments::run_optimize_detuning(&cfg, &cli.out),
        Command::SidebandScan => experiments::run_sideband_scan(&cfg, &cli.out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
