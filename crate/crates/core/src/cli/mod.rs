//! Batch front-end: scenario files in, CSV trajectories and JSON reports out.

pub mod commands;
pub mod scenario;

pub use commands::{compare_report, horizon_report, simulate, sweep, Mode, Scale, SweepSpec};
pub use scenario::{parse_scenario, serialize_scenario, ScenarioConfig};
