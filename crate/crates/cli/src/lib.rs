//! Scenario files, the runner behind `ldp run`, and the CSV report.

pub mod literal;
pub mod runner;
pub mod scenario;

pub use runner::{run, Row, RunReport, Status, CSV_HEADER};
pub use scenario::{parse_scenario, ConfigError, Scenario};
