//! Flat `key=value` config files. Keys mirror the long flag names; flags
//! given on the command line win over the file.

use std::collections::BTreeMap;
use std::path::Path;

use qgh_core::eval::Format;
use qgh_core::qpe::{Evolution, InputStrategy, Mode};
use qgh_core::walk::{DirectionMap, TorusGrid};
use qgh_core::{FingerprintConfig, HashConfig};

use crate::HashArgs;

pub const KEYS: [&str; 10] = [
    "grid-n",
    "qubits",
    "input-state",
    "evolution",
    "mode",
    "shots",
    "seed",
    "taus",
    "direction-map",
    "start-node",
];

/// A usage problem (exit 2) or an environment failure (exit 1).
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<qgh_core::Error> for CliError {
    fn from(e: qgh_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected key=value, got '{line}'", lineno + 1))
        })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::Usage(format!("config line {}: unknown key '{key}'", lineno + 1)));
        }
        out.insert(key.to_owned(), value.trim().to_owned());
    }
    Ok(out)
}

pub fn load_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid value '{value}' for --{key}")))
}

fn pick<T: std::str::FromStr + Clone>(
    key: &str,
    flag: &Option<T>,
    file: &BTreeMap<String, String>,
    default: T,
) -> Result<T, CliError> {
    if let Some(v) = flag {
        return Ok(v.clone());
    }
    match file.get(key) {
        Some(v) => parse_value(key, v),
        None => Ok(default),
    }
}

/// Merges flags over the config file over defaults, then validates each
/// field so errors can name the flag at fault.
pub fn resolve(args: &HashArgs) -> Result<HashConfig, CliError> {
    let file = match &args.config {
        Some(path) => load_config_file(path)?,
        None => BTreeMap::new(),
    };
    let d = HashConfig::default();
    let cfg = HashConfig {
        grid_n: pick("grid-n", &args.grid_n, &file, d.grid_n)?,
        qubits: pick("qubits", &args.qubits, &file, d.qubits)?,
        input: pick::<InputStrategy>("input-state", &args.input_state, &file, d.input)?,
        evolution: pick::<Evolution>("evolution", &args.evolution, &file, d.evolution)?,
        mode: pick::<Mode>("mode", &args.mode, &file, d.mode)?,
        shots: pick("shots", &args.shots, &file, d.shots)?,
        seed: pick("seed", &args.seed, &file, d.seed)?,
        fingerprint: pick::<FingerprintConfig>("taus", &args.taus, &file, d.fingerprint.clone())?,
        direction_map: pick("direction-map", &args.direction_map, &file, d.direction_map)?,
        start_node: pick("start-node", &args.start_node, &file, d.start_node)?,
    };
    check(&cfg)?;
    Ok(cfg)
}

fn check(cfg: &HashConfig) -> Result<(), CliError> {
    let bad = |flag: &str, e: String| Err(CliError::Usage(format!("invalid value for --{flag}: {e}")));
    let grid = match TorusGrid::new(cfg.grid_n) {
        Ok(g) => g,
        Err(e) => return bad("grid-n", e.to_string()),
    };
    if let Err(e) = DirectionMap::from_id(cfg.direction_map) {
        return bad("direction-map", e.to_string());
    }
    if cfg.start_node >= grid.nodes() {
        return bad("start-node", format!("{} is outside the {} grid nodes", cfg.start_node, grid.nodes()));
    }
    if cfg.qubits == 0 || cfg.qubits > qgh_core::qpe::MAX_QUBITS {
        return bad("qubits", format!("must be in 1..={}", qgh_core::qpe::MAX_QUBITS));
    }
    if let InputStrategy::Node(s) = cfg.input {
        if s >= grid.nodes() {
            return bad("input-state", format!("node {s} is outside the {} grid nodes", grid.nodes()));
        }
    }
    if cfg.mode == Mode::Shots && cfg.shots == 0 {
        return bad("shots", "must be at least 1 in shot mode".into());
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))
}

pub fn parse_formats(s: &str) -> Result<Vec<Format>, CliError> {
    if s == "both" {
        return Ok(vec![Format::Json, Format::Csv]);
    }
    s.parse::<Format>()
        .map(|f| vec![f])
        .map_err(|_| CliError::Usage(format!("invalid value '{s}' for --format")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let m = parse_config_text("# comment\n\ngrid-n = 3\nmode=shots\n").unwrap();
        assert_eq!(m.get("grid-n").map(String::as_str), Some("3"));
        assert_eq!(m.get("mode").map(String::as_str), Some("shots"));
    }

    #[test]
    fn rejects_unknown_keys_and_garbage() {
        assert!(matches!(parse_config_text("colour=blue"), Err(CliError::Usage(_))));
        assert!(matches!(parse_config_text("grid-n"), Err(CliError::Usage(_))));
    }
}
