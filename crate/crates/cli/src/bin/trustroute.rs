use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use trustroute_cli::aggregate::compare;
use trustroute_cli::format::num;
use trustroute_cli::{config, output, runner, Result};

#[derive(Parser)]
#[command(version, about = "Trust-gated Q-learning routing simulator for VANETs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario over one or more seeds and write CSVs.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Seed count (counting up from the config seed) or comma-separated list.
        #[arg(long, default_value = "1")]
        seeds: String,
        /// Concurrent runs; defaults to the number of CPUs.
        #[arg(long)]
        parallelism: Option<usize>,
        /// Snapshot trust, Q-tables and positions every N episodes.
        #[arg(long)]
        snapshot_every: Option<usize>,
    },
    /// Compare one aggregate metric between two run directories.
    Compare {
        run_a: PathBuf,
        run_b: PathBuf,
        metric: String,
        /// Where compare.csv goes.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Parse and validate a scenario file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config: path,
            out,
            seeds,
            parallelism,
            snapshot_every,
        } => {
            let mut cfg = config::load(&path)?;
            if snapshot_every.is_some() {
                cfg.snapshot_every = snapshot_every;
                cfg.validate().map_err(|e| trustroute_cli::Error::Config {
                    path: path.clone(),
                    line: None,
                    message: e.to_string(),
                })?;
            }
            let seeds = runner::parse_seeds(&seeds, cfg.seed)?;
            let threads = parallelism
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
                .max(1);
            log::info!("running {} seed(s) on {threads} thread(s)", seeds.len());
            let runs = runner::run_seeds(&cfg, &seeds, threads)?;
            let agg = output::write_run(&out, &runs)?;
            for row in agg {
                if let Some(m) = row.mean {
                    println!("{:<32} {}", row.metric, num(m));
                }
            }
            Ok(())
        }
        Command::Compare {
            run_a,
            run_b,
            metric,
            out,
        } => {
            let c = compare(&run_a, &run_b, &metric, &out)?;
            println!("{}", c.describe());
            Ok(())
        }
        Command::Validate { config: path } => {
            config::load(&path)?;
            println!("{}: ok", path.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
