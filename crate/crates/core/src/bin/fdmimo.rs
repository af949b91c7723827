use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fdmimo::harness::{
    dump_channels, run_experiment_with_threads, timing_rows, write_outputs, ConfigFile,
    ExperimentSpec, Outputs, OUTAGE_RATE_BPS_HZ,
};

#[derive(Parser)]
#[command(
    name = "fdmimo",
    version,
    about = "Full-duplex MIMO TX power minimization experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunOpts {
    /// Output directory (overrides `output_dir` from the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed (overrides `master_seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Monte-Carlo trials per grid cell (overrides `n_trials`).
    #[arg(long)]
    trials: Option<usize>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full mode × rate × P_max grid and write every result file.
    Run {
        /// Flat TOML config file.
        config: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// TX power and residual SI versus target rate (figure2.csv, figure3.csv).
    SweepRates {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Outage probability versus P_max at 8 bps/Hz (figure4.csv).
    SweepPmax {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Mean solve time per TX mode (table1.csv).
    Bench {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Write per-trial channel dumps for cross-checking.
    DumpChannels {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        opts: RunOpts,
    },
}

fn load_spec(config: Option<&Path>, opts: &RunOpts) -> fdmimo::Result<ExperimentSpec> {
    let file = match config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let mut spec = file.into_spec()?;
    if let Some(out) = &opts.out {
        spec.output_dir = out.clone();
    }
    if let Some(seed) = opts.seed {
        spec.master_seed = seed;
    }
    if let Some(trials) = opts.trials {
        spec.n_trials = trials;
    }
    spec.validate()?;
    Ok(spec)
}

fn execute(spec: &ExperimentSpec, threads: usize, which: Outputs) -> fdmimo::Result<()> {
    let rows = run_experiment_with_threads(spec, threads)?;
    for path in write_outputs(spec, &rows, &spec.output_dir, which)? {
        println!("wrote {}", path.display());
    }
    if which.timings {
        println!("{:<8} {:>14} {:>10}", "mode", "mean time [s]", "iters");
        for t in timing_rows(spec, &rows) {
            println!(
                "{:<8} {:>14.4e} {:>10.2}",
                t.tx_mode, t.mean_runtime_s, t.mean_iterations
            );
        }
    }
    Ok(())
}

fn run(cli: Cli) -> fdmimo::Result<()> {
    match cli.command {
        Command::Run { config, opts } => {
            let spec = load_spec(Some(&config), &opts)?;
            execute(&spec, opts.threads, Outputs::ALL)
        }
        Command::SweepRates { config, opts } => {
            let mut spec = load_spec(config.as_deref(), &opts)?;
            spec.p_max_sweep_dbm.clear();
            let which = Outputs {
                rate_figures: true,
                outage_figure: false,
                timings: false,
            };
            execute(&spec, opts.threads, which)
        }
        Command::SweepPmax { config, opts } => {
            let mut spec = load_spec(config.as_deref(), &opts)?;
            spec.target_rates_bps_hz = vec![OUTAGE_RATE_BPS_HZ];
            let which = Outputs {
                rate_figures: false,
                outage_figure: true,
                timings: false,
            };
            execute(&spec, opts.threads, which)
        }
        Command::Bench { config, opts } => {
            let mut spec = load_spec(config.as_deref(), &opts)?;
            spec.p_max_sweep_dbm.clear();
            // timing runs single-threaded so solves do not contend for cores
            let threads = if opts.threads == 0 { 1 } else { opts.threads };
            let which = Outputs {
                rate_figures: false,
                outage_figure: false,
                timings: true,
            };
            execute(&spec, threads, which)
        }
        Command::DumpChannels { config, opts } => {
            let spec = load_spec(config.as_deref(), &opts)?;
            let n = opts.trials.unwrap_or(1);
            for path in dump_channels(&spec, n, &spec.output_dir)? {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
