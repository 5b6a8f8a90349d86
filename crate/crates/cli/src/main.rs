//! `perimeter`: solve, bound, simulate and validate perimeter-defense
//! scenarios.

mod commands;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "perimeter", version, about = "Perimeter-defense game solver and simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One defender against each intruder: value, breaching points, controls.
    Solve1v1(Common),
    /// Defenders 0 and 1 against each intruder: pair value, regions, pincer.
    Solve2v1(Common),
    /// Score bounds and assignments for the whole team.
    Bounds(Common),
    /// Run the scenario to completion.
    Simulate(Common),
    /// Random instances: bound chain and simulated score checks.
    Montecarlo(Common),
    /// Agreement of the solver with independent validators.
    Oracle(Common),
    /// Sampled barrier of each defender.
    Barrier(Common),
}

/// Flags shared by every subcommand. Flags override the scenario file.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Scenario JSON document.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Output directory for files; created if missing.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Capture radius.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Also write SVG drawings.
    #[arg(long)]
    pub svg: bool,
    /// Grid nodes per axis for level sets, or samples for barriers.
    #[arg(long)]
    pub grid: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve1v1(a) => commands::solve1v1(&a),
        Command::Solve2v1(a) => commands::solve2v1(&a),
        Command::Bounds(a) => commands::bounds(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Montecarlo(a) => commands::montecarlo(&a),
        Command::Oracle(a) => commands::oracle(&a),
        Command::Barrier(a) => commands::barrier(&a),
    };
    match result {
        Ok(report) => {
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
