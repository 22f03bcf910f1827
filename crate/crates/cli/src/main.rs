mod angle;
mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::json;

use args::{Cli, Command, Format};
use commands::{CliError, Outcome};

/// Environment variable holding the worker thread count.
const THREADS_ENV: &str = "PARITYCHECK_THREADS";

fn configure_threads() {
    let Ok(raw) = std::env::var(THREADS_ENV) else { return };
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                log::warn!("could not size the thread pool: {e}");
            }
        }
        _ => log::warn!("ignoring {THREADS_ENV}={raw:?}; expected a positive integer"),
    }
}

fn parameters(cmd: &Command) -> serde_json::Value {
    let v = match cmd {
        Command::VerifyIdentities(a) => serde_json::to_value(a),
        Command::Simulate(a) => serde_json::to_value(a),
        Command::Bounds(a) => serde_json::to_value(a),
        Command::Overhead(a) => serde_json::to_value(a),
        Command::Triortho(a) => serde_json::to_value(a),
    };
    v.expect("arguments serialize")
}

fn run(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::VerifyIdentities(a) => commands::verify_identities(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::Overhead(a) => commands::overhead_cmd(a),
        Command::Triortho(a) => commands::triortho(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    configure_threads();

    let start = Instant::now();
    let outcome = match run(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;

    let body = match cli.command.format() {
        Format::Text => outcome.text,
        Format::Csv => match outcome.csv {
            Some(csv) => csv,
            None => {
                eprintln!("error: csv output is not available for {}", cli.command.name());
                return ExitCode::from(2);
            }
        },
        Format::Json => {
            let envelope = json!({
                "command": cli.command.name(),
                "parameters": parameters(&cli.command),
                "tool_version": env!("CARGO_PKG_VERSION"),
                "wall_time_ms": wall_time_ms,
                "result": outcome.result,
            });
            serde_json::to_string_pretty(&envelope).expect("json") + "\n"
        }
    };
    // a closed pipe downstream is not an error worth reporting
    let _ = std::io::stdout().lock().write_all(body.as_bytes());
    if outcome.claim_holds {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
