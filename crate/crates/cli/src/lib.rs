//! Configuration parsing, suite orchestration and CSV/JSON output for chaoslab.

pub mod config;
pub mod emit;
pub mod suite;

pub use config::{parse_config, parse_config_file, ConfigError, SuiteConfig, DEFAULT_SEED};
pub use emit::{emit_series, format_float, EmitError};
pub use suite::{run_suite, ExperimentRecord, RunManifest, SuiteError};
