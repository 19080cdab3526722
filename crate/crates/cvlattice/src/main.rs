use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use cvlattice::{experiments, run_named, ExperimentConfig};

/// Run one lattice experiment and write its results to a run directory.
#[derive(Debug, Parser)]
#[command(name = "cvlattice", version)]
struct Cli {
    /// Experiment name.
    experiment: String,

    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,

    /// `key=value` overrides applied after the file.
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if experiments().get(&cli.experiment).is_err() {
        eprintln!(
            "error: unknown experiment '{}' (available: {})",
            cli.experiment,
            experiments().names().join(", ")
        );
        return ExitCode::from(2);
    }
    let cfg = match ExperimentConfig::load(cli.config.as_deref(), &cli.overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| run_named(&cli.experiment, &cfg)) {
        Ok((dir, metrics)) => {
            for (name, value) in metrics.entries() {
                log::info!("{name} = {value:.6e}");
            }
            log::info!("results written to {}", dir.path().display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
