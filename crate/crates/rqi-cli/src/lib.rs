//! File-driven runs over the transport, measurement, interferometry and
//! reference-frame pipelines.

pub mod commands;
pub mod config;

pub use config::{Command, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: `{key}`: {msg}")]
    Config { key: String, msg: String },
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        CliError::Config {
            key: key.into(),
            msg: msg.into(),
        }
    }

    pub fn numeric(e: impl std::fmt::Display) -> Self {
        CliError::Numeric(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numeric(_) | CliError::Io(_) => 1,
        }
    }
}

/// Run one command, returning the artifact text.
pub fn run(cfg: &RunConfig) -> Result<String, CliError> {
    match cfg.command {
        Command::CowTable => commands::cow_table(cfg),
        Command::TransportFermion => commands::transport_fermion(cfg),
        Command::TransportPhoton => commands::transport_photon(cfg),
        Command::Measure => commands::measure(cfg),
        Command::Teleport => commands::teleport(cfg),
        Command::QrfDecohere => commands::qrf_decohere(cfg),
        Command::QrfOverlap => commands::qrf_overlap(cfg),
        Command::Bhd => commands::bhd(cfg),
    }
}
