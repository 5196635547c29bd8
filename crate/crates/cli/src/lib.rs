//! Batch front end for `critorbit`: config parsing, the artifact pipeline and
//! the Julia-set renderer behind the `critorbit` binary.

pub mod config;
pub mod pipeline;
pub mod render;

pub use config::RunConfig;
pub use pipeline::{run, RunOutcome, Stage, StageError};
pub use render::{render_julia, JuliaImage};

/// Exit code when no stage reported instability evidence.
pub const EXIT_OK: i32 = 0;
/// Exit code for invalid configs and failed stages.
pub const EXIT_ERROR: i32 = 2;
/// Exit code when diagnostics found instability evidence.
pub const EXIT_INSTABILITY: i32 = 10;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}
