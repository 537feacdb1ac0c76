//! Batch front end for `cclab-core`: JSON run configurations, the check
//! suite, CSV/JSON reports and dense-grid oracles for the optimizers.

pub mod config;
pub mod error;
pub mod oracle;
pub mod report;
pub mod suite;

pub use config::{Check, Format, RunConfig};
pub use error::{CliError, Result};
pub use report::Row;
pub use suite::{run_suite, SuiteOutcome};
