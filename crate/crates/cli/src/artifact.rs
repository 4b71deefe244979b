use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Writes files into one directory, stamping each with the tool version and
/// the configuration hash.
pub struct ArtifactWriter {
    dir: PathBuf,
    config_hash: String,
    command: &'static str,
    written: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config_sha256: &'a str,
    payload: &'a T,
}

impl ArtifactWriter {
    pub fn new(dir: &Path, config_hash: String, command: &'static str) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(ArtifactWriter { dir: dir.to_path_buf(), config_hash, command, written: Vec::new() })
    }

    pub fn comments(&self) -> Vec<String> {
        vec![format!("frameflow {VERSION} {}", self.command), format!("config_sha256 {}", self.config_hash)]
    }

    pub fn json<T: Serialize>(&mut self, name: &str, payload: &T) -> Result<PathBuf, CliError> {
        let env = Envelope {
            tool: "frameflow",
            version: VERSION,
            command: self.command,
            config_sha256: &self.config_hash,
            payload,
        };
        let mut text = serde_json::to_string_pretty(&env).map_err(|e| CliError::Numerical(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// `body` must already contain its header line.
    pub fn csv(&mut self, name: &str, body: &str) -> Result<PathBuf, CliError> {
        let mut text = String::new();
        for c in self.comments() {
            text.push_str("# ");
            text.push_str(&c);
            text.push('\n');
        }
        text.push_str(body);
        self.write(name, text.as_bytes())
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn record(&mut self, path: PathBuf) {
        self.written.push(path);
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}
