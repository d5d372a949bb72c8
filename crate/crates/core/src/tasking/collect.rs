//! Travel-time measurement by simulating one robot between every location pair.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use super::{TaskingError, TravelTimeGraph};
use crate::dynamics::RobotState;
use crate::engine::{Engine, Event, RunOptions, Scenario};
use crate::ids::{LocationId, RobotId};

/// How repeated measurements of one pair are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    #[default]
    Max,
    Mean,
}

/// Simulated time after which a single traversal counts as unreachable (s).
pub const COLLECTION_TIME_CAP: f64 = 600.0;

/// Time for a lone robot starting at `from` with `heading` to reach `to`.
pub fn traverse_time(scenario: &Scenario, from: LocationId, to: LocationId, heading: f64) -> Result<f64, TaskingError> {
    let start = scenario
        .network
        .location(from)
        .map_err(|e| TaskingError::Collection(e.to_string()))?;
    let mut solo = scenario.clone();
    let mut robot = solo
        .robots
        .first()
        .cloned()
        .ok_or_else(|| TaskingError::Collection("scenario has no robots".into()))?;
    robot.id = RobotId(0);
    robot.start = start;
    robot.heading = heading;
    solo.robots = vec![robot];
    solo.humans.clear();
    solo.task_stream.clear();
    solo.config.duration = COLLECTION_TIME_CAP;
    let mut engine = Engine::new(&solo, RunOptions::minimal());
    engine.drive_to(RobotId(0), &[to]).map_err(|e| TaskingError::Collection(e.to_string()))?;
    let mut seen = 0;
    while !engine.is_finished() && !engine.robot_faulted(RobotId(0)) {
        engine.step().map_err(|e| TaskingError::Collection(e.to_string()))?;
        let events = engine.events();
        let arrived = events[seen..].iter().find_map(|e| match e {
            Event::Arrival { t, location, .. } if *location == to => Some(*t),
            _ => None,
        });
        if let Some(t) = arrived {
            return Ok(t);
        }
        seen = events.len();
    }
    let s: RobotState = engine.robot_state(RobotId(0)).unwrap_or_default();
    Err(TaskingError::Collection(format!(
        "no traversal from location {from} to {to} within {COLLECTION_TIME_CAP} s (stopped at {:.2}, {:.2})",
        s.x, s.y
    )))
}

/// Builds the symmetric travel-time graph, running `reps` traversals per direction
/// with start headings spread evenly over the circle.
pub fn collect_travel_times(scenario: &Scenario, reps: usize, agg: Aggregation) -> Result<TravelTimeGraph, TaskingError> {
    if reps == 0 {
        return Err(TaskingError::Collection("reps must be at least 1".into()));
    }
    let n = scenario.network.len();
    let mut w = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let mut samples = Vec::with_capacity(2 * reps);
            for (a, b) in [(i, j), (j, i)] {
                for k in 0..reps {
                    let heading = TAU * k as f64 / reps as f64;
                    samples.push(traverse_time(scenario, a, b, heading)?);
                }
            }
            let value = match agg {
                Aggregation::Max => samples.iter().copied().fold(f64::MIN, f64::max),
                Aggregation::Mean => samples.iter().sum::<f64>() / samples.len() as f64,
            };
            w[i][j] = value;
            w[j][i] = value;
        }
    }
    TravelTimeGraph::new((0..n).collect(), w)
}
