//! Scenario loading, the verification pipeline, and report rendering used by
//! the `kkverify` binary.

pub mod pipeline;
pub mod report;
pub mod scenario;

pub use pipeline::{run_pipeline, Options, CHECK_IDS};
pub use report::{Check, Report, Status, Summary, SCHEMA_VERSION, TOOL_VERSION};
pub use scenario::{Scenario, ScenarioError, SCENARIO_SCHEMA};
