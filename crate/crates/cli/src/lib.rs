//! File formats, pipeline and reports behind the `ged` binary.

pub mod config;
pub mod error;
pub mod formats;
pub mod pipeline;
pub mod report;

pub use error::{CliError, Result};
