use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fluence::{build_document, export_bundle, run, CliError, RunConfig};

/// Run Fluence programs and explore how their outputs were computed.
#[derive(Parser)]
#[command(name = "fluence", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a program and print its value.
    Run {
        entry: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Write the document bundle (views, graph, intermediates) as JSON.
    Export {
        entry: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the document over HTTP.
    Serve {
        entry: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        port: Option<u16>,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run { entry, config } => {
            // Only checked for validity; running needs no inputs.
            RunConfig::load(&entry, config.as_deref())?;
            println!("{}", run(&entry)?.value);
        }
        Command::Export { entry, config, out } => {
            let mut cfg = RunConfig::load(&entry, config.as_deref())?;
            if out.is_some() {
                cfg.out = out;
            }
            let path = export_bundle(&cfg)?;
            eprintln!("wrote {}", path.display());
        }
        Command::Serve { entry, config, port } => {
            let mut cfg = RunConfig::load(&entry, config.as_deref())?;
            if let Some(p) = port {
                cfg.port = p;
            }
            let doc = build_document(&cfg)?;
            let rt = tokio::runtime::Runtime::new().expect("tokio runtime");
            rt.block_on(fluence::server::serve(doc, cfg.port))
                .map_err(|e| CliError::Config { path: cfg.entry.clone(), message: format!("server failed: {e}") })?;
        }
    }
    Ok(())
}
