//! Suite configuration files.
//!
//! ```text
//! # comments start with '#' or ';'
//! seed = 42                          # master seed (optional)
//! experiments = delta_smp, ergodic   # which experiments to run (optional)
//!
//! [delta_smp]                        # one section per experiment
//! gamma = 0.5
//! separations = 1, 2                 # lists are comma separated
//! ```
//!
//! Without an `experiments` key the suite runs the experiments that have a
//! section, or every experiment when there are no sections. Omitted keys
//! take their defaults.

use std::path::Path;

use chaoslab_core::experiments::{Params, EXPERIMENTS};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation error in [{experiment}]: {message}")]
    Validation { experiment: String, message: String },
    #[error("cannot read config: {0}")]
    Io(String),
}

/// A parsed and validated suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub experiments: Vec<Params>,
}

pub const DEFAULT_SEED: u64 = 20_240_601;

pub fn parse_config_file(path: &Path) -> Result<SuiteConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Parse {
        line,
        column,
        message: message.into(),
    }
}

pub fn parse_config(text: &str) -> Result<SuiteConfig, ConfigError> {
    let mut seed = DEFAULT_SEED;
    let mut selected: Option<Vec<String>> = None;
    let mut sections: Vec<Params> = Vec::new();
    let mut current: Option<usize> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split(['#', ';']).next().unwrap_or("");
        let indent = content.len() - content.trim_start().len();
        let line = content.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| parse_err(line_no, indent + line.len(), "missing `]`"))?
                .trim();
            if sections.iter().any(|p| p.name() == name) {
                return Err(parse_err(
                    line_no,
                    indent + 2,
                    format!("duplicate section `{name}`"),
                ));
            }
            let params = Params::default_for(name).ok_or_else(|| {
                parse_err(line_no, indent + 2, format!("unknown experiment `{name}`"))
            })?;
            sections.push(params);
            current = Some(sections.len() - 1);
            continue;
        }
        let eq = line
            .find('=')
            .ok_or_else(|| parse_err(line_no, indent + 1, "expected `key = value`"))?;
        let key = line[..eq].trim();
        let value = line[eq + 1..].trim();
        let value_col =
            indent + eq + 2 + (line[eq + 1..].len() - line[eq + 1..].trim_start().len());
        if key.is_empty() {
            return Err(parse_err(line_no, indent + 1, "empty key"));
        }
        match current {
            None => match key {
                "seed" => {
                    seed = value.parse().map_err(|_| {
                        parse_err(
                            line_no,
                            value_col,
                            format!("seed must be an unsigned integer, got `{value}`"),
                        )
                    })?;
                }
                "experiments" => {
                    let names: Vec<String> =
                        value.split(',').map(|s| s.trim().to_string()).collect();
                    if let Some(bad) = names.iter().find(|n| Params::default_for(n).is_none()) {
                        return Err(parse_err(
                            line_no,
                            value_col,
                            format!("unknown experiment `{bad}`"),
                        ));
                    }
                    selected = Some(names);
                }
                _ => {
                    return Err(parse_err(
                        line_no,
                        indent + 1,
                        format!("unknown key `{key}`"),
                    ))
                }
            },
            Some(i) => {
                let params = &mut sections[i];
                if !params.keys().contains(&key) {
                    return Err(parse_err(
                        line_no,
                        indent + 1,
                        format!("unknown key `{key}` for [{}]", params.name()),
                    ));
                }
                params
                    .set(key, value)
                    .map_err(|m| parse_err(line_no, value_col, format!("{key}: {m}")))?;
            }
        }
    }

    let names: Vec<String> = match selected {
        Some(n) => n,
        None if !sections.is_empty() => sections.iter().map(|p| p.name().to_string()).collect(),
        None => EXPERIMENTS.iter().map(|(n, _)| n.to_string()).collect(),
    };
    // suite order follows the registry
    let mut experiments = Vec::new();
    for (name, _) in EXPERIMENTS {
        if !names.iter().any(|n| n == name) {
            continue;
        }
        let params = sections
            .iter()
            .find(|p| p.name() == *name)
            .cloned()
            .unwrap_or_else(|| Params::default_for(name).expect("registered"));
        params.validate().map_err(|e| ConfigError::Validation {
            experiment: name.to_string(),
            message: e.to_string(),
        })?;
        experiments.push(params);
    }
    Ok(SuiteConfig { seed, experiments })
}
