mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

/// Why a run failed; bad invocations and bad inputs exit with 2.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Spec(String),
    Input(String),
    Compute(krein_core::Error),
    Io(String),
}

impl From<krein_core::Error> for Failure {
    fn from(e: krein_core::Error) -> Self {
        Failure::Compute(e)
    }
}

impl Failure {
    fn kind(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage",
            Failure::Spec(_) => "spec",
            Failure::Input(_) => "input",
            Failure::Compute(_) => "compute",
            Failure::Io(_) => "io",
        }
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Spec(_) | Failure::Input(_) => 2,
            Failure::Compute(_) | Failure::Io(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Spec(m) | Failure::Input(m) | Failure::Io(m) => m.clone(),
            Failure::Compute(e) => e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let report = serde_json::json!({"error": f.kind(), "command": cli.command.name(), "message": f.message()});
            eprintln!("krein: {report}");
            ExitCode::from(f.code())
        }
    }
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads as usize)
        .build_global()
        .map_err(|e| Failure::Io(format!("thread pool: {e}")))?;
    let artifact = commands::run(cli)?;
    artifact
        .commit(cli.output.as_deref())
        .map_err(|e| Failure::Io(format!("writing output: {e}")))
}
