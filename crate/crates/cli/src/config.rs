//! `key=value` configuration files and option precedence.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::table::Format;
use crate::{CliError, GlobalArgs};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: u64 = 200;
pub const DEFAULT_TOL: f64 = 1e-8;

const KEYS: [&str; 6] = ["seed", "samples", "threads", "out", "format", "tol"];

/// Options after applying flags, then `EXPSUM_*` variables, then the
/// config file, then defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub seed: u64,
    pub samples: u64,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub tol: f64,
}

/// Parse `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        let key = key.trim().to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!("config line {}: unknown key {key:?}", i + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

fn from_config<T: std::str::FromStr>(config: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
    config
        .get(key)
        .map(|v| {
            v.parse()
                .map_err(|_| CliError::Usage(format!("config key {key}: cannot parse {v:?}")))
        })
        .transpose()
}

/// Resolve options; flags and environment are already merged by clap.
pub fn resolve(args: &GlobalArgs) -> Result<Settings, CliError> {
    let config = match &args.config {
        Some(path) => read_config(path)?,
        None => BTreeMap::new(),
    };
    let format = match args.format {
        Some(f) => f,
        None => match config.get("format").map(String::as_str) {
            None | Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(other) => {
                return Err(CliError::Usage(format!(
                    "config key format: expected csv or json, got {other:?}"
                )))
            }
        },
    };
    let settings = Settings {
        seed: args.seed.or(from_config(&config, "seed")?).unwrap_or(DEFAULT_SEED),
        samples: args
            .samples
            .or(from_config(&config, "samples")?)
            .unwrap_or(DEFAULT_SAMPLES),
        threads: args.threads.or(from_config(&config, "threads")?),
        out: args.out.clone().or(from_config(&config, "out")?),
        format,
        tol: args.tol.or(from_config(&config, "tol")?).unwrap_or(DEFAULT_TOL),
    };
    if settings.samples == 0 {
        return Err(CliError::Usage("samples must be at least 1".into()));
    }
    if settings.threads == Some(0) {
        return Err(CliError::Usage("threads must be at least 1".into()));
    }
    if !(settings.tol > 0.0 && settings.tol <= 1e-3) {
        return Err(CliError::Usage(format!(
            "tol must lie in (0, 1e-3], got {}",
            settings.tol
        )));
    }
    Ok(settings)
}
