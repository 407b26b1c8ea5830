//! Scenario files, built-in presets, the classify → simulate → verify
//! pipeline and its CSV/JSON output, on top of `eplab-core`.

pub mod cli;
pub mod error;
pub mod output;
pub mod presets;
pub mod runner;
pub mod scenario;

pub use error::{LabError, Result};
pub use runner::{run, ConsistencyStatus, RunReport};
pub use scenario::{
    build_scenario, load_scenario, preset_scenario, Overrides, Scenario, ScenarioConfig,
};
