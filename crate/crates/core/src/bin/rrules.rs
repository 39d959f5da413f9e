use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rrules::experiment::{
    parse_manifest, render_outcome, run_experiment, run_suite, ExperimentArgs, ExperimentConfig,
    OutputFormat,
};
use rrules::Error;

#[derive(Parser)]
#[command(name = "rrules", version, about = "RULES / RRULES rule induction benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    #[command(flatten)]
    args: ExperimentArgs,

    /// Manifest file: one experiment per line, using the flags above
    #[arg(long, conflicts_with = "data")]
    suite: Option<PathBuf>,

    /// Worker threads for untimed suites
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in fixtures
    Fixtures,
}

const EXIT_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(Command::Fixtures) = cli.command {
        for name in rrules::dataset::FIXTURE_NAMES {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }
    match &cli.suite {
        Some(path) => suite(path, cli.args.format, cli.jobs),
        None => single(&cli.args),
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Undefined(_) => ExitCode::from(EXIT_FAILED),
        _ => ExitCode::from(EXIT_INVALID),
    }
}

fn single(args: &ExperimentArgs) -> ExitCode {
    let cfg = match ExperimentConfig::from_args(args, None) {
        Ok(cfg) => cfg,
        Err(e) => return fail(&e),
    };
    let outcome = match run_experiment(&cfg) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    match render_outcome(&outcome, &cfg) {
        Ok(text) => print!("{text}"),
        Err(e) => return fail(&e),
    }
    if outcome.passed() {
        ExitCode::SUCCESS
    } else {
        eprintln!("error: rule set verification failed");
        ExitCode::from(EXIT_FAILED)
    }
}

fn suite(path: &PathBuf, format: OutputFormat, jobs: usize) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let entries = parse_manifest(&text, path.parent());
    if entries.is_empty() {
        eprintln!("error: {}: no experiments", path.display());
        return ExitCode::from(EXIT_INVALID);
    }
    for (line, entry) in &entries {
        if let Err(e) = entry {
            eprintln!("{}:{line}: {e}", path.display());
        }
    }
    let report = run_suite(&entries, jobs);
    match report.render(format) {
        Ok(text) => print!("{text}"),
        Err(e) => return fail(&e),
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}
