use std::path::PathBuf;
use std::process::ExitCode;

use chessflow_cli::commands::{compare_cmd, effective, simulate, sweep, termination_label};
use chessflow_cli::{HarnessError, RunConfig};
use clap::{Args, Parser, Subcommand};

/// Forced crystalline curvature flow of polyrectangles in a chessboard medium.
#[derive(Parser)]
#[command(name = "chessflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// `key = value` configuration file.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Overrides a configuration key (repeatable), e.g. `--set epsilon=0.1`.
    #[arg(short, long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (same as `--set output=DIR`).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, HarnessError> {
        let mut set = self.set.clone();
        if let Some(o) = &self.output {
            set.push(format!("output={}", o.display()));
        }
        Ok(RunConfig::load(self.config.as_deref(), &set)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one ε-flow: trajectory.csv, events.log, frames/NNNN.svg.
    Simulate(Common),
    /// Integrate the effective (ε → 0) motion: effective.csv, case.txt.
    Effective(Common),
    /// ε-flow against the effective flow over an ε list: report.csv.
    Compare(Common),
    /// One simulation per ε, in parallel: eps_<ε>/, sweep.csv.
    Sweep(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(c) => c.load().and_then(|cfg| simulate(&cfg)).map(|tr| {
            format!(
                "{} events, {}",
                tr.events.len(),
                termination_label(&tr.termination)
            )
        }),
        Command::Effective(c) => c.load().and_then(|cfg| effective(&cfg)),
        Command::Compare(c) => c
            .load()
            .and_then(|cfg| compare_cmd(&cfg))
            .map(|r| r.to_csv()),
        Command::Sweep(c) => c.load().and_then(|cfg| sweep(&cfg)),
    };
    match result {
        Ok(summary) => {
            println!("{}", summary.trim_end());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
