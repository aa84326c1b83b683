//! Library side of the vegidx command-line tool: pipeline configuration,
//! orchestration and the exit-code taxonomy. The binary in `main.rs` is a
//! thin argument-parsing layer over this.

pub mod config;
pub mod error;
pub mod pipeline;

pub use config::{parse_indices, BandRef, BandRoles, PipelineConfig};
pub use error::CliError;
pub use pipeline::{all_artifacts, index_artifacts, run_pipeline};
