//! Batch verification harness: scenario files, the check suites, JSON
//! reports and CSV plot data.

pub mod app;
pub mod catalog;
pub mod error;
pub mod report;
pub mod scenario;
pub mod suites;

pub use app::main_with_args;
pub use error::{CliError, Result};
