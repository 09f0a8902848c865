use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::error::{internal, CliError};

/// Collects the files of one invocation and writes its manifest.
pub struct OutputDir {
    pub path: PathBuf,
    files: Vec<String>,
}

impl OutputDir {
    pub fn create(path: PathBuf) -> Result<Self, CliError> {
        fs::create_dir_all(&path)
            .map_err(|e| internal(format!("cannot create `{}`: {e}", path.display())))?;
        Ok(OutputDir {
            path,
            files: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let p = self.path.join(name);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent)
                .map_err(|e| internal(format!("cannot create `{}`: {e}", parent.display())))?;
        }
        fs::write(&p, contents)
            .map_err(|e| internal(format!("cannot write `{}`: {e}", p.display())))?;
        self.files.push(name.to_string());
        Ok(p)
    }

    pub fn finish(mut self, manifest: Manifest) -> Result<PathBuf, CliError> {
        self.files.sort();
        let doc = ManifestDoc {
            tool: "navbench",
            version: env!("CARGO_PKG_VERSION"),
            command: manifest.command,
            config_digest: manifest.config_digest,
            config: manifest.config,
            seeds: manifest.seeds,
            inputs: manifest.inputs,
            outputs: self.files.clone(),
            runs: manifest.runs,
            wall_clock_s: manifest.started.elapsed().as_secs_f64(),
        };
        let text = serde_json::to_string_pretty(&doc).map_err(internal)?;
        self.write("manifest.json", &(text + "\n"))?;
        Ok(self.path)
    }
}

pub struct Manifest {
    pub command: &'static str,
    pub config_digest: String,
    pub config: Value,
    pub seeds: Vec<u64>,
    pub inputs: BTreeMap<String, String>,
    pub runs: Value,
    pub started: Instant,
}

#[derive(Serialize)]
struct ManifestDoc {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config_digest: String,
    config: Value,
    seeds: Vec<u64>,
    /// path -> sha256 of the contents
    inputs: BTreeMap<String, String>,
    outputs: Vec<String>,
    runs: Value,
    wall_clock_s: f64,
}

pub fn display(p: &Path) -> String {
    p.display().to_string()
}
