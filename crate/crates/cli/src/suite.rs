//! Running a suite and recording its manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use chaoslab_core::experiments::{Params, Verdict, EXPERIMENTS};
use chaoslab_core::rng::derive_seed;
use serde::Serialize;

use crate::config::SuiteConfig;
use crate::emit::{emit_series, EmitError};

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error(transparent)]
    Emit(#[from] EmitError),
    #[error("cannot write {path}: {message}")]
    Io { path: String, message: String },
}

/// Result of one experiment within a run.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRecord {
    pub name: String,
    pub seed: u64,
    pub passed: bool,
    pub params: Params,
    pub verdict: Option<Verdict>,
    pub error: Option<String>,
    pub files: Vec<String>,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub config: SuiteConfig,
    pub experiments: Vec<ExperimentRecord>,
    pub all_passed: bool,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    /// 0 when every verdict passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_passed {
            0
        } else {
            1
        }
    }
}

/// Seed of an experiment: derived from the master seed and the experiment's
/// registry position, so it does not depend on which other experiments run.
pub fn experiment_seed(master: u64, name: &str) -> u64 {
    let idx = EXPERIMENTS
        .iter()
        .position(|(n, _)| *n == name)
        .unwrap_or(usize::MAX);
    derive_seed(master, idx as u64 + 1)
}

/// Runs every configured experiment, writes one CSV per series and
/// `manifest.json` into `out_dir`.
pub fn run_suite(config: &SuiteConfig, out_dir: &Path) -> Result<RunManifest, SuiteError> {
    let io = |path: &Path, e: std::io::Error| SuiteError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    fs::create_dir_all(out_dir).map_err(|e| io(out_dir, e))?;
    let start = Instant::now();
    let mut records = Vec::new();
    for params in &config.experiments {
        let name = params.name();
        let seed = experiment_seed(config.seed, name);
        let t0 = Instant::now();
        let outcome = params.run(seed);
        let mut files = Vec::new();
        let (passed, verdict, error) = match outcome {
            Ok(out) => {
                for s in &out.series {
                    let path: PathBuf = emit_series(&s.name, &s.columns, &s.rows, out_dir)?;
                    files.push(path.file_name().unwrap().to_string_lossy().into_owned());
                }
                (out.verdict.passed, Some(out.verdict), None)
            }
            Err(e) => (false, None, Some(e.to_string())),
        };
        records.push(ExperimentRecord {
            name: name.to_string(),
            seed,
            passed,
            params: params.clone(),
            verdict,
            error,
            files,
            wall_clock_seconds: t0.elapsed().as_secs_f64(),
        });
    }
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        config: config.clone(),
        all_passed: records.iter().all(|r| r.passed),
        experiments: records,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    let path = out_dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, json).map_err(|e| io(&path, e))?;
    Ok(manifest)
}
