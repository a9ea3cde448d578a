//! `ojs`: run jammer-selection experiments and write CSV plot data.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use ojs_core::experiments::{self, csv::write_outputs, ExperimentOutput, ExperimentSpec, Mode};
use ojs_core::selection::SearchMode;

#[derive(Debug, Parser)]
#[command(name = "ojs", version, about = "Opportunistic jammer selection experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// SNR sweep with a fixed jammer pool.
    Fixed(RunArgs),
    /// SNR sweep with the pool scaled as max(K, round(c * P^a)).
    Scaling(RunArgs),
    /// Secrecy outage curve of Eve's saturated rate.
    Outage(RunArgs),
    /// Covering-radius trend of random subspace codebooks.
    Covering(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Flat `key = value` experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Master seed (overrides the config file).
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials per grid point (overrides the config file).
    #[arg(long)]
    trials: Option<usize>,
    /// Primary CSV output; sidecar files are written next to it.
    #[arg(long, default_value = "ojs_output.csv")]
    out: PathBuf,
    /// Use greedy subset search instead of the exhaustive scan.
    #[arg(long)]
    greedy: bool,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long)]
    workers: Option<usize>,
}

fn build_spec(mode: Mode, args: &RunArgs) -> Result<ExperimentSpec> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))?;
    let mut spec = experiments::spec_from_str(mode, &text)?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(trials) = args.trials {
        spec.trials = trials;
    }
    if args.greedy {
        spec.search = SearchMode::Greedy;
    }
    spec.validate()?;
    Ok(spec)
}

fn report(output: &ExperimentOutput) {
    match output {
        ExperimentOutput::Sweep(sweep) => {
            for d in &sweep.dof {
                println!("{:<12} {:<8} slope {:.4} ({} points)", d.scheme, d.metric, d.slope, d.window_points);
            }
        }
        ExperimentOutput::Outage(out) => {
            println!("{} samples, r = {:.4} bits at epsilon = {}", out.sample_count, out.r, out.epsilon);
            for d in &out.dof {
                println!("{:<12} {:<15} slope {:.4}", d.scheme, d.metric, d.slope);
            }
        }
        ExperimentOutput::Covering(out) => {
            for s in &out.summary {
                println!("M = {:<5} delta_c = {:.5} +- {:.5}", s.m, s.mean, s.stderr);
            }
            if let Some(slope) = out.log_log_slope {
                println!("log-log slope {slope:.4}");
            }
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let (mode, args) = match &cli.command {
        Command::Fixed(a) => (Mode::FixedSweep, a),
        Command::Scaling(a) => (Mode::ScalingSweep, a),
        Command::Outage(a) => (Mode::Outage, a),
        Command::Covering(a) => (Mode::Covering, a),
    };
    let spec = build_spec(mode, args)?;
    let output = experiments::run(&spec, args.workers)?;
    let written = write_outputs(&spec, &output, &args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    report(&output);
    println!("wrote {}", written.primary.display());
    for extra in &written.extra {
        println!("wrote {}", extra.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
