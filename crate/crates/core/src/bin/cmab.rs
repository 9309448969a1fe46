use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cmab_core::arm_model::validate_instance;
use cmab_core::harness::build::build_instance;
use cmab_core::harness::{fmt_num, run_bounds, run_experiment, sweep, ExperimentConfig};
use cmab_core::Result;

#[derive(Parser)]
#[command(name = "cmab", version, about = "Combinatorial bandit experiments and regret bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write trajectories, aggregates and metadata.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one experiment per value of a numeric config key.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        axis: String,
        #[arg(long, num_args = 1.., required = true)]
        values: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate regret bounds only.
    Bounds {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the config and the instance it describes.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load(path: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::load(path)?;
    if let Some(s) = seed {
        config.seed = s;
    }
    if let Some(o) = out {
        config.output = o;
    }
    Ok(config)
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, seed, out } => {
            let config = load(&config, seed, out)?;
            let summary = run_experiment(&config)?;
            let n = config.horizon;
            println!("wrote {}", summary.output.display());
            if let Some(mean) = summary.mean_regret_at(n) {
                println!(
                    "{}: mean cumulative regret at t = {n}: {}",
                    summary.policy,
                    fmt_num(mean)
                );
            }
            for b in &summary.bounds {
                println!("bound {}: {}", b.name, fmt_num(b.value));
            }
        }
        Command::Sweep {
            config,
            axis,
            values,
            out,
        } => {
            let config = load(&config, None, out)?;
            for e in sweep(&config, &axis, &values)? {
                println!(
                    "{axis} = {}: {} ({})",
                    fmt_num(e.value),
                    fmt_num(e.final_mean_regret),
                    e.output.display()
                );
            }
        }
        Command::Bounds { config, out } => {
            let config = load(&config, None, out)?;
            for b in run_bounds(&config)? {
                println!("{} at n = {}: {}", b.name, b.horizon, fmt_num(b.value));
            }
        }
        Command::Validate { config } => {
            let config = load(&config, None, None)?;
            let instance = build_instance(&config.instance)?;
            let violations = validate_instance(&instance);
            for v in &violations {
                println!("{v}");
            }
            if !violations.is_empty() {
                return Ok(false);
            }
            println!("ok");
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
