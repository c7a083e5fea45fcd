use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qlab_cli::plan::{ExperimentPlan, Format, NoiseSpec, Task};
use qlab_cli::sweep::{default_out_dir, run};
use qlab_cli::{HarnessError, Result};

/// Desk-scale learning experiments: conventional versus quantum-enhanced
/// strategies on states, dynamics and principal components, with the
/// matching sample-complexity bounds.
#[derive(Parser)]
#[command(name = "lab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// TOML plan file; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Master seed (overrides the plan).
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory (overrides the plan).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Readout-noise profile JSON (overrides the plan).
    #[arg(long)]
    noise: Option<PathBuf>,

    /// Comma-separated output formats: csv, json, svg.
    #[arg(long, value_delimiter = ',')]
    format: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Pauli-observable comparison on the product-state ensemble.
    States(CommonArgs),
    /// Time-reversal-symmetry classification of random circuits.
    Dynamics(CommonArgs),
    /// Principal-component hypothesis testing.
    Qpca(CommonArgs),
    /// Closed-form conventional lower bounds over a range of n.
    Bounds(CommonArgs),
}

fn build_plan(task: Task, args: &CommonArgs) -> Result<ExperimentPlan> {
    let mut plan = match &args.config {
        Some(path) => ExperimentPlan::from_file(path)?,
        None => ExperimentPlan::default(),
    };
    plan.task = task;
    if let Some(seed) = args.seed {
        plan.seed = seed;
    }
    if let Some(out) = &args.out {
        plan.out_dir = Some(out.clone());
    }
    if let Some(noise_path) = &args.noise {
        plan.noise = Some(NoiseSpec::from_file(noise_path)?);
    }
    if !args.format.is_empty() {
        let mut formats = Vec::new();
        for name in &args.format {
            formats.push(match name.as_str() {
                "csv" => Format::Csv,
                "json" => Format::Json,
                "svg" => Format::Svg,
                other => {
                    return Err(HarnessError::Config(format!("unknown format {other:?}")));
                }
            });
        }
        plan.formats = formats;
    }
    plan.validate()?;
    Ok(plan)
}

fn execute(task: Task, args: &CommonArgs) -> Result<()> {
    let plan = build_plan(task, args)?;
    let out_dir = plan.out_dir.clone().unwrap_or_else(|| default_out_dir(&plan));
    let output = run(&plan, &out_dir)?;
    match task {
        Task::States => {
            for point in &output.record.states {
                let reach = match point.min_budget {
                    Some(b) => format!("{b} experiments ({} copies)", point.min_copies.unwrap_or(0)),
                    None => format!("not reached within {}", point.cap),
                };
                println!(
                    "n={:<3} {:<17} target {:.0}%: {}",
                    point.n,
                    point.strategy,
                    point.accuracy_target * 100.0,
                    reach
                );
            }
        }
        Task::Dynamics => {
            for point in &output.record.dynamics {
                println!(
                    "n={} depth={} {:<17} reps={:<5} accuracy={:.3}",
                    point.n, point.depth, point.strategy, point.repetitions, point.accuracy
                );
            }
        }
        Task::Qpca => {
            for point in &output.record.qpca {
                println!(
                    "n={} {:<17} copies={:<5} accuracy={:.3} (bound {:.1})",
                    point.n, point.strategy, point.copies, point.accuracy, point.lower_bound
                );
            }
        }
        Task::Bounds => {
            println!("{} bound values written", output.record.bounds.len());
        }
    }
    println!("outputs in {}", out_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (task, args) = match &cli.command {
        Command::States(args) => (Task::States, args),
        Command::Dynamics(args) => (Task::Dynamics, args),
        Command::Qpca(args) => (Task::Qpca, args),
        Command::Bounds(args) => (Task::Bounds, args),
    };
    match execute(task, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
