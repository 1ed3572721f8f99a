//! Harness library behind the `overlay-heal` binary: configuration
//! layering, experiment execution, and file output.

pub mod config;
pub mod output;
pub mod runner;

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {message}")]
    InvalidValue { key: String, message: String },
    #[error("cannot read config file {path}: {message}")]
    ConfigIo { path: PathBuf, message: String },
    #[error(transparent)]
    Engine(#[from] overlay_heal_core::EngineError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}
