//! File formats, scenario runner and parallel Monte Carlo around
//! `photonsrc-core`.

pub mod dataset;
pub mod error;
pub mod histogram;
pub mod parallel;
pub mod report;
pub mod run;
pub mod scenario;

pub use error::{CliError, FormatError};
pub use report::Format;
pub use run::{run, RunOptions};
pub use scenario::{Mode, Scenario};
