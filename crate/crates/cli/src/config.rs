//! `fluence.json`: which top-level names are inputs, plus serving and
//! export defaults. Looked for beside the entry file unless given
//! explicitly; a missing default file just means no inputs.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

pub const CONFIG_FILE: &str = "fluence.json";
pub const DEFAULT_PORT: u16 = 8320;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    inputs: Vec<String>,
    port: Option<u16>,
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub entry: PathBuf,
    pub inputs: Vec<String>,
    pub port: u16,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Reads the configuration for `entry`. `explicit` must exist if given.
    pub fn load(entry: &Path, explicit: Option<&Path>) -> Result<Self, CliError> {
        let (path, required) = match explicit {
            Some(p) => (p.to_path_buf(), true),
            None => (entry.parent().unwrap_or(Path::new("")).join(CONFIG_FILE), false),
        };
        let file = match std::fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str::<FileConfig>(&text)
                .map_err(|e| CliError::Config { path: path.clone(), message: e.to_string() })?,
            Err(e) if required || e.kind() != std::io::ErrorKind::NotFound => {
                return Err(CliError::Config { path, message: e.to_string() })
            }
            Err(_) => FileConfig::default(),
        };
        // Relative output paths are relative to the configuration file.
        let out = file.out.map(|o| if o.is_absolute() { o } else { path.parent().unwrap_or(Path::new("")).join(o) });
        Ok(RunConfig { entry: entry.to_path_buf(), inputs: file.inputs, port: file.port.unwrap_or(DEFAULT_PORT), out })
    }

    /// Where `export` writes: the configured path, or `<entry>.bundle.json`.
    pub fn out_path(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| self.entry.with_extension("bundle.json"))
    }
}
