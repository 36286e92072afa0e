//! Pipeline from a model file to regret tables and figures.

pub mod config;
pub mod error;
pub mod manifest;
pub mod pipeline;
pub mod report;
pub mod store;

pub use config::PipelineConfig;
pub use error::{PipelineError, Result};
pub use manifest::Manifest;
pub use pipeline::{run_pipeline, Pipeline, Stage};
