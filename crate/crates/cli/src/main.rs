//! `kedlaya`: command-line checks of weighted Kedlaya-type inequalities.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use args::{
    AxiomsArgs, CheckArgs, ConcavityArgs, ProofFnArgs, ProportionalArgs, RefuteArgs, SweepArgs,
};
use output::{CliError, Rendered};

#[derive(Parser, Debug)]
#[command(
    name = "kedlaya",
    version,
    about = "Check weighted Kedlaya-type inequalities for weighted means"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate both sides of the inequality for one input.
    Check(CheckArgs),
    /// Run the inequality on seeded random inputs.
    Sweep(SweepArgs),
    /// Probe and search for a violation of the reversed inequality for weights outside V_n.
    Refute(RefuteArgs),
    /// Compare the analytic Jensen class of a mean with random midpoint tests.
    Concavity(ConcavityArgs),
    /// Measure the residuals of the five mean axioms on random instances.
    Axioms(AxiomsArgs),
    /// Build the step function used to prove the j-th step inequality.
    #[command(name = "proof-fn", alias = "dump-proof-fn")]
    ProofFn(ProofFnArgs),
    /// Construct and verify a theta-proportional subset of a rectangle.
    Proportional(ProportionalArgs),
}

/// Sizes the global thread pool from `KEDLAYA_THREADS`.
fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("KEDLAYA_THREADS") else {
        return Ok(());
    };
    let threads = raw
        .trim()
        .parse::<usize>()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            CliError::usage(format!(
                "KEDLAYA_THREADS must be a positive integer, got {raw:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::usage(format!("cannot start {threads} threads: {e}")))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    configure_threads()?;
    let (rendered, out): (Rendered, _) = match cli.command {
        Command::Check(a) => (commands::check(&a)?, a.output),
        Command::Sweep(a) => (commands::sweep(&a)?, a.output),
        Command::Refute(a) => (commands::refute(&a)?, a.output),
        Command::Concavity(a) => (commands::concavity(&a)?, a.output),
        Command::Axioms(a) => (commands::axioms(&a)?, a.output),
        Command::ProofFn(a) => (commands::proof_fn(&a)?, a.output),
        Command::Proportional(a) => (commands::proportional(&a)?, a.output),
    };
    output::write(&rendered.body, out.out.as_deref())?;
    Ok(rendered.failed)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
