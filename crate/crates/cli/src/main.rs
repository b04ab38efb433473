use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hartree_core::acceptance::Suite;
use hartree_core::config::{ExperimentConfig, Scenario};
use hartree_core::experiment::{run, RunOptions};
use hartree_core::HartreeError;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_ACCEPTANCE: u8 = 4;

#[derive(Parser)]
#[command(name = "hartree", version, about = "Experiments for the energy-critical inhomogeneous Hartree equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Overrides {
    /// Experiment configuration file.
    config: PathBuf,
    /// Write artifacts here instead of the configured `output.dir`.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Override the configured RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for sweep rows.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario named in the configuration.
    Run(Overrides),
    /// Solve for the ground state only.
    GroundState(Overrides),
    /// Run the amplitude ladder around the ground state.
    Sweep(Overrides),
    /// Run the acceptance suite.
    Verify {
        /// Only these criteria, comma separated.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        /// Also write the reports as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run(o) => run_config(o, None),
        Command::GroundState(o) => run_config(o, Some(Scenario::GroundState)),
        Command::Sweep(o) => run_config(o, Some(Scenario::Dichotomy)),
        Command::Verify { only, json } => verify(&only, json),
    }
}

fn exit_for(e: &HartreeError) -> ExitCode {
    match e {
        HartreeError::Config { .. } | HartreeError::Param { .. } | HartreeError::Grid(_) => ExitCode::from(EXIT_CONFIG),
        _ => ExitCode::from(EXIT_NUMERICAL),
    }
}

fn run_config(o: Overrides, scenario: Option<Scenario>) -> ExitCode {
    let mut cfg = match ExperimentConfig::from_path(&o.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(s) = scenario {
        cfg.scenario = s;
    }
    if let Some(dir) = o.output_dir {
        cfg.output_dir = dir;
    }
    if let Some(seed) = o.seed {
        cfg.seed = seed;
    }
    let mut opts = RunOptions::default();
    if let Some(t) = o.threads {
        opts.threads = t.max(1);
    }
    match run(&cfg, &opts) {
        Ok(outcome) => {
            for a in &outcome.artifacts {
                log::info!("wrote {}", a.display());
            }
            match outcome.failure {
                Some(msg) => {
                    eprintln!("numerical failure: {msg}");
                    ExitCode::from(EXIT_NUMERICAL)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}

fn verify(only: &[u8], json: Option<PathBuf>) -> ExitCode {
    let suite = Suite::new();
    let reports: Vec<_> = if only.is_empty() {
        suite.run_all()
    } else {
        only.iter().filter_map(|&id| suite.run_one(id)).collect()
    };
    for r in &reports {
        println!("{}", r.line());
        print!("{}", r.details());
    }
    if let Some(path) = json {
        let write = serde_json::to_string_pretty(&reports)
            .map_err(|e| e.to_string())
            .and_then(|s| std::fs::write(&path, s + "\n").map_err(|e| e.to_string()));
        if let Err(e) = write {
            eprintln!("cannot write {}: {e}", path.display());
        }
    }
    if reports.iter().all(|r| r.passed()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_ACCEPTANCE)
    }
}
