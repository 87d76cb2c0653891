use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use flowctl::{execute, Command, Input, Options};
use linflow::topflow::Strategy;

#[derive(Parser)]
#[command(
    name = "flowctl",
    version,
    about = "Entropy of linear flows over prime fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Algebraic and topological entropy.
    Entropy(Common),
    /// Pinsker subflow, D₊ and the entropy bookkeeping around them.
    Pinsker(Common),
    /// Bernoulli-factor witnesses with conjugacy data.
    Bernoulli(Common),
    /// Cross-pipeline checks on a module and its dual.
    Bridge(Common),
    /// Invariant-subspace lattice of a finite-dimensional flow.
    Lattice(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Structural,
    Witness,
    Both,
}

#[derive(Args)]
struct Common {
    /// Flow document; repeat for several.
    #[arg(long = "in", required = true)]
    inputs: Vec<PathBuf>,
    /// Report path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    horizon: usize,
    #[arg(long, default_value_t = 4)]
    max_level: usize,
    #[arg(long, value_enum, default_value = "both")]
    strategy: StrategyArg,
    /// Witness search stops after this many.
    #[arg(long, default_value_t = 8)]
    max_witnesses: usize,
    /// Levels compared in pinsker and bridge.
    #[arg(long, default_value_t = 8)]
    levels: usize,
    /// Exhaustive dual Goldie search in lattice.
    #[arg(long)]
    exhaustive: bool,
    /// Parallel workers across input files.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, args) = match cli.command {
        Cmd::Entropy(a) => (Command::Entropy, a),
        Cmd::Pinsker(a) => (Command::Pinsker, a),
        Cmd::Bernoulli(a) => (Command::Bernoulli, a),
        Cmd::Bridge(a) => (Command::Bridge, a),
        Cmd::Lattice(a) => (Command::Lattice, a),
    };
    match run(cmd, args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("flowctl: {e:#}");
            ExitCode::from(flowctl::EXIT_PARSE as u8)
        }
    }
}

fn run(cmd: Command, args: Common) -> anyhow::Result<i32> {
    let seed = match std::env::var("FLOWCTL_SEED") {
        Ok(s) => Some(
            s.trim()
                .parse::<u64>()
                .context("FLOWCTL_SEED must be an unsigned integer")?,
        ),
        Err(_) => None,
    };
    let opts = Options {
        horizon: args.horizon,
        max_level: args.max_level,
        strategy: match args.strategy {
            StrategyArg::Structural => Strategy::Structural,
            StrategyArg::Witness => Strategy::Witness,
            StrategyArg::Both => Strategy::Both,
        },
        max_witnesses: args.max_witnesses,
        levels: args.levels,
        exhaustive: args.exhaustive,
        seed,
    };
    let inputs = args
        .inputs
        .iter()
        .map(|p| {
            let bytes = std::fs::read(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(Input {
                path: p.display().to_string(),
                bytes,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;

    let (report, code, failures) = execute(cmd, &inputs, &opts, args.jobs);
    for f in &failures {
        eprintln!("flowctl: {f}");
    }
    let text = serde_json::to_string_pretty(&report)? + "\n";
    match &args.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(code)
}
