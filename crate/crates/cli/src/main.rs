//! Command-line front end for the decentralized joint-sparse recovery
//! solvers: single-configuration trial runs, parameter sweeps with CSV/SVG
//! output, and topology reports.

mod config;
mod output;
mod plot;
mod run;
mod sweep;
mod topology_cmd;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::ExperimentConfig;

/// Exit code for configuration problems.
const EXIT_CONFIG: u8 = 2;
/// Exit code for runtime/numeric failures.
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(
    name = "cbdsbl",
    about = "Decentralized joint-sparse signal recovery experiments (CB-DSBL / M-SBL)",
    version
)]
struct Cli {
    /// Worker threads for trial-level parallelism (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Root seed override (the CBDSBL_SEED environment variable takes
    /// precedence over this flag, which takes precedence over the config).
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Path to the experiment TOML; omit to use built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory override.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one set of trials at a fixed configuration and write report/trace
    /// CSVs plus a reproducibility manifest.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        /// Also solve every trial with centralized M-SBL and add its metric
        /// columns to the report.
        #[arg(long)]
        compare_centralized: bool,
    },
    /// Run a parameter sweep and write the per-cell results CSV (plus the
    /// boundary CSV for two-axis grids).
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// Print the resolved grid size and exit without running anything.
        #[arg(long)]
        dry_run: bool,
        /// Render static SVG plots next to the CSVs.
        #[arg(long)]
        plot: bool,
    },
    /// Generate a topology, select bridge nodes, and print the edge list with
    /// the constraint spectrum and the closed-form penalty parameter.
    Topology {
        /// Number of nodes.
        nodes: usize,
        /// Edge probability in (0, 1].
        prob: f64,
    },
}

fn load_config(args: &ConfigArgs, cli_seed: Option<u64>) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli_seed {
        cfg.root_seed = seed;
    }
    if let Ok(env_seed) = std::env::var("CBDSBL_SEED") {
        cfg.root_seed = env_seed
            .parse()
            .map_err(|e| anyhow::anyhow!("CBDSBL_SEED: {e} (value {env_seed:?})"))?;
    }
    if let Some(out) = &args.out {
        cfg.output.dir = out.clone();
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(EXIT_CONFIG);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: cannot configure {jobs} worker thread(s): {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    }

    let result: anyhow::Result<()> = match &cli.command {
        Command::Run {
            config,
            compare_centralized,
        } => match load_config(config, cli.seed) {
            Ok(cfg) => run::cmd_run(&cfg, *compare_centralized),
            Err(e) => {
                eprintln!("config error: {e:#}");
                return ExitCode::from(EXIT_CONFIG);
            }
        },
        Command::Sweep {
            config,
            dry_run,
            plot,
        } => match load_config(config, cli.seed) {
            Ok(cfg) => sweep::cmd_sweep(&cfg, *dry_run, *plot),
            Err(e) => {
                eprintln!("config error: {e:#}");
                return ExitCode::from(EXIT_CONFIG);
            }
        },
        Command::Topology { nodes, prob } => {
            // Argument validation failures are config errors.
            if *nodes < 2 || !(*prob > 0.0 && *prob <= 1.0) {
                eprintln!(
                    "config error: topology needs nodes >= 2 and prob in (0, 1] (got {nodes}, {prob})"
                );
                return ExitCode::from(EXIT_CONFIG);
            }
            let seed = match std::env::var("CBDSBL_SEED") {
                Ok(s) => match s.parse() {
                    Ok(v) => v,
                    Err(e) => {
                        eprintln!("config error: CBDSBL_SEED: {e}");
                        return ExitCode::from(EXIT_CONFIG);
                    }
                },
                Err(_) => cli.seed.unwrap_or(0),
            };
            topology_cmd::cmd_topology(*nodes, *prob, seed)
        }
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
