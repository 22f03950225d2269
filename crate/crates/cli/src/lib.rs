//! Shared pieces of the `fluence` command: run configuration, building a
//! document from a program on disk, and the HTTP service over it.

pub mod config;
pub mod server;

use std::path::{Path, PathBuf};

use fluence_core::document::{Document, DocumentError};
use fluence_core::loader::{run_file, LoadError, Program};

pub use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Load(#[from] LoadError),
    #[error("{0}")]
    Document(#[from] DocumentError),
    #[error("configuration {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("cannot write {path}: {message}")]
    Write { path: PathBuf, message: String },
}

impl CliError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Load(LoadError::Syntax { .. }) => 2,
            CliError::Load(LoadError::Desugar { .. } | LoadError::Cycle { .. } | LoadError::Structure { .. }) => 3,
            CliError::Load(LoadError::Eval { .. }) => 4,
            CliError::Document(DocumentError::View { .. }) => 4,
            CliError::Load(LoadError::Missing { .. })
            | CliError::Document(DocumentError::UnboundInput(_))
            | CliError::Config { .. }
            | CliError::Write { .. } => 5,
        }
    }
}

/// Evaluates the entry program.
pub fn run(entry: &Path) -> Result<Program, CliError> {
    Ok(run_file(entry)?)
}

/// Evaluates the entry program and packages it for a reader.
pub fn build_document(config: &RunConfig) -> Result<Document, CliError> {
    let program = run(&config.entry)?;
    Ok(Document::new(program, &config.inputs)?)
}

/// Writes the document bundle and returns the path written.
pub fn export_bundle(config: &RunConfig) -> Result<PathBuf, CliError> {
    let doc = build_document(config)?;
    let out = config.out_path();
    std::fs::write(&out, doc.to_json()).map_err(|e| CliError::Write { path: out.clone(), message: e.to_string() })?;
    Ok(out)
}
