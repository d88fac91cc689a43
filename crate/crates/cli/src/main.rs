mod cli;
mod commands;
mod output;
mod systems;

use clap::Parser;

use cli::{Analyze, Cli, Command, EnvelopeCmd, SlovakCmd, SuspensionCmd};
use output::{config, emit, Artifact, CliError, CliResult};

fn dispatch(cli: &Cli) -> CliResult<Artifact> {
    let g = &cli.global;
    match &cli.command {
        Command::Entropy(a) => commands::entropy(g, a),
        Command::Analyze(Analyze::Complexity(a)) => commands::analyze_complexity(g, a),
        Command::Analyze(Analyze::Recurrence(a)) => commands::analyze_recurrence(g, a),
        Command::Analyze(Analyze::Equicontinuity(a)) => commands::analyze_equicontinuity(g, a),
        Command::Envelope(EnvelopeCmd::LowerBound(a)) => commands::envelope_lower_bound(g, a),
        Command::Envelope(EnvelopeCmd::Discreteness(a)) => commands::envelope_discreteness(g, a),
        Command::Envelope(EnvelopeCmd::Constants(a)) => commands::envelope_constants(g, a),
        Command::Slovak(SlovakCmd::Build(a)) => commands::slovak_build(g, a),
        Command::Slovak(SlovakCmd::Fibers(a)) => commands::slovak_fibers(g, a),
        Command::Slovak(SlovakCmd::Successor(a)) => commands::slovak_successor(g, a),
        Command::Slovak(SlovakCmd::UcCheck(a)) => commands::slovak_uc_check(g, a),
        Command::Slovak(SlovakCmd::Graph(a)) => commands::slovak_graph(g, a),
        Command::Suspension(SuspensionCmd::Trace(a)) => commands::suspension_trace(g, a),
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    if let Some(jobs) = cli.global.jobs {
        if jobs == 0 {
            return Err(config("--jobs must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| config(format!("cannot start {jobs} workers: {e}")))?;
    }
    let artifact = dispatch(cli)?;
    emit(&cli.global, &artifact)?;
    match artifact.violation {
        Some(msg) => Err(CliError::Violation(msg)),
        None => Ok(()),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("dynlab: {e}");
        std::process::exit(e.exit_code());
    }
}
