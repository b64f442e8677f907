use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use groupoidal::site::Backend;
use groupoidal_cli::{parse_model, run_command, CliError, CliReport, Opts, FIXTURES};

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Finset,
    Fintop,
}

/// Checks internal groupoids, actions and bibundles over finite sites.
#[derive(Parser)]
#[command(name = "groupoidal", version)]
struct Args {
    /// validate, compose, equiv, decompose, orbit, nerve or axioms
    command: String,
    /// Declared names the command works on
    names: Vec<String>,
    /// Model file; the built-in examples when absent
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "finset")]
    backend: BackendArg,
    /// Carrier cap for searches and samples
    #[arg(long, env = "GROUPOIDAL_MAX", default_value_t = 4)]
    max: usize,
    /// Also write the report as JSON
    #[arg(long)]
    json: Option<PathBuf>,
}

fn run(args: &Args) -> Result<CliReport, CliError> {
    let text = match &args.model {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        None => FIXTURES.to_string(),
    };
    let model = parse_model(&text)?;
    let backend = match args.backend {
        BackendArg::Finset => Backend::FinSet,
        BackendArg::Fintop => Backend::FinTop,
    };
    run_command(&model, &args.command, &args.names, &Opts { backend, max: args.max })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let report = run(&args).unwrap_or_else(|e| CliReport::error(&args.command, &e));
    // a closed pipe is not an error worth reporting
    let _ = write!(std::io::stdout(), "{report}");
    if let Some(path) = &args.json {
        let json = serde_json::to_string_pretty(&report).expect("plain data");
        if let Err(e) = std::fs::write(path, json + "\n") {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(report.exit_code())
}
