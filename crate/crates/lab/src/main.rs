use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stable_sde_lab::{run_experiment, ExperimentConfig, LabError, RayonReplicator};

#[derive(Parser)]
#[command(name = "stable-sde-lab", version, about = "Monte Carlo experiments for SDEs driven by stable subordinators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

fn run(config: PathBuf, seed: Option<u64>, out: Option<PathBuf>, threads: usize) -> Result<i32, LabError> {
    let mut cfg = ExperimentConfig::load(&config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if out.is_some() {
        cfg.out = out;
    }
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from(format!("out/{}", cfg.experiment)));
    let pool = RayonReplicator::new(threads).map_err(|e| std::io::Error::other(e.to_string()))?;
    let outcome = run_experiment(&cfg, &dir, &pool)?;
    for c in &outcome.checks {
        let verdict = if c.pass { "ok" } else { "FAIL" };
        let threshold = c.threshold.map(|t| format!(" (threshold {t})")).unwrap_or_default();
        println!("{verdict:>4}  {} = {}{threshold}", c.name, c.value);
    }
    for f in &outcome.failures {
        eprintln!("{f}");
    }
    println!("{} -> {}", cfg.experiment, dir.display());
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run { config, seed, out, threads } = cli.command;
    let code = match run(config, seed, out, threads) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
