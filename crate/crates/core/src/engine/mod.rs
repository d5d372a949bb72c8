//! Scenario loading, the simulation loop, traces and run metrics.

mod metrics;
mod scenario;
mod sim;
mod trace;

use std::path::PathBuf;
use thiserror::Error;

pub use metrics::{compute_metrics, MetricsReport};
pub use scenario::{
    load_scenario, AgentSpec, HumanSpec, RoadwaySpec, RobotSpec, Room, RoomSpec, RunConfig, Scenario, ScenarioFile,
    ScenarioSources,
};
pub use sim::{run, run_with, Engine, RunOptions};
pub use trace::{ClusterRecord, Event, QueueAction, Trace, TraceHeader, TraceRoom, TRACE_FORMAT};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("invalid scenario:\n  {}", .0.join("\n  "))]
    Scenario(Vec<String>),
    #[error("invalid trace: {0}")]
    Trace(String),
}

impl EngineError {
    /// Process exit code: 3 for I/O, 2 for invalid input.
    pub fn exit_code(&self) -> i32 {
        match self {
            EngineError::Io { .. } => 3,
            EngineError::Scenario(_) | EngineError::Trace(_) => 2,
        }
    }
}
