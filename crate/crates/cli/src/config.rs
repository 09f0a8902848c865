use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{internal, user, CliError};

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "NAVBENCH_OUT";
const DEFAULT_OUT: &str = "navbench-out";

/// Keys that never influence results and stay out of the config digest.
const RUNTIME_KEYS: [&str; 2] = ["threads", "out_root"];

pub fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| user(format!("cannot read `{}`: {e}", path.display())))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Options from a TOML config file. Keys may sit at the top level or in a
/// table named after the subcommand (`[sim]`, `[eval_waypoints]`, ...).
fn file_options(path: &Path, command: &str) -> Result<Map<String, Value>, CliError> {
    let text = read_input(path)?;
    let doc: toml::Table =
        toml::from_str(&text).map_err(|e| user(format!("config `{}`: {e}", path.display())))?;
    let section = match doc.get(command) {
        Some(toml::Value::Table(t)) => t.clone(),
        _ => doc,
    };
    match serde_json::to_value(section).map_err(internal)? {
        Value::Object(m) => Ok(m),
        _ => Err(internal("config section is not a table")),
    }
}

fn is_unset(v: &Value) -> bool {
    match v {
        Value::Null => true,
        Value::Bool(b) => !b,
        Value::Array(a) => a.is_empty(),
        _ => false,
    }
}

/// Overlays the options given on the command line onto those from the
/// config file. A flag left at its default does not override the file.
pub fn merge<T: Serialize + DeserializeOwned>(
    cli: &T,
    config: Option<&Path>,
    command: &str,
) -> Result<T, CliError> {
    let Value::Object(cli_map) = serde_json::to_value(cli).map_err(internal)? else {
        return Err(internal("options do not serialize to a map"));
    };
    let mut merged = match config {
        Some(p) => file_options(p, command)?,
        None => Map::new(),
    };
    for (k, v) in cli_map {
        if !is_unset(&v) || !merged.contains_key(&k) {
            merged.insert(k, v);
        }
    }
    let origin = config.map(|p| p.display().to_string()).unwrap_or_default();
    serde_json::from_value(Value::Object(merged))
        .map_err(|e| user(format!("invalid options {origin}: {e}")))
}

/// Digest of the resolved options and the digests of every input file.
pub fn config_digest<T: Serialize>(
    command: &str,
    options: &T,
    inputs: &BTreeMap<String, String>,
) -> Result<(String, Value), CliError> {
    let mut opts = serde_json::to_value(options).map_err(internal)?;
    if let Value::Object(m) = &mut opts {
        for k in RUNTIME_KEYS {
            m.remove(k);
        }
    }
    let doc = serde_json::json!({ "command": command, "options": opts, "inputs": inputs });
    let canonical = serde_json::to_string(&doc).map_err(internal)?;
    Ok((sha256_hex(canonical.as_bytes()), opts))
}

pub fn output_dir(out_root: Option<&Path>, command: &str, digest: &str) -> PathBuf {
    let root = out_root
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    root.join(format!("{command}-{}", &digest[..16]))
}
