//! Travel-time graph, task model, allocation solvers and the dispatcher.
//!
//! Solvers see robots as `(location, available_at)` plus any tasks they are
//! committed to: a pickup they are already driving to is pinned first, and
//! carried tasks only need their drop-off. The built-in exact solver minimizes
//! makespan under hard deadlines; the greedy solver is the scalable fallback.

mod collect;
mod dispatch;
mod exact;
mod graph;
mod greedy;

pub use collect::{collect_travel_times, Aggregation};
pub use dispatch::{ArrivalRecord, DispatchOutcome, Dispatcher, SolverChoice, TaskState, TaskStatus};
pub use exact::{solve_exact, EXACT_MAX_ROBOTS, EXACT_MAX_TASKS};
pub use graph::TravelTimeGraph;
pub use greedy::solve_greedy;

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

use crate::ids::{LocationId, RobotId, TaskId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TaskingError {
    #[error("unknown location {0}")]
    UnknownLocation(LocationId),
    #[error("invalid travel-time graph: {0}")]
    InvalidGraph(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid task: {0}")]
    InvalidTask(String),
    #[error("{tasks} tasks / {robots} robots exceed the exact solver caps; use the greedy solver")]
    TooLarge { tasks: usize, robots: usize },
    #[error("no schedule meets every deadline")]
    Infeasible,
    #[error("travel-time collection failed: {0}")]
    Collection(String),
}

/// One pickup/drop-off job as written in a task request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub start: LocationId,
    pub end: LocationId,
    pub deadline: f64,
}

/// A batch of tasks released at `arrival`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskRequest {
    pub arrival: f64,
    pub tasks: Vec<TaskSpec>,
}

impl TaskRequest {
    pub fn validate(&self) -> Result<(), TaskingError> {
        for (k, t) in self.tasks.iter().enumerate() {
            if t.start == t.end {
                return Err(TaskingError::InvalidTask(format!("request at t={} task {k}: start equals end", self.arrival)));
            }
            if !(t.deadline > self.arrival) {
                return Err(TaskingError::InvalidTask(format!(
                    "request at t={} task {k}: deadline {} is not after arrival",
                    self.arrival, t.deadline
                )));
            }
        }
        Ok(())
    }
}

/// Parses a task-stream file: a JSON list of requests.
pub fn parse_task_stream(text: &str) -> Result<Vec<TaskRequest>, TaskingError> {
    let stream: Vec<TaskRequest> = serde_json::from_str(text).map_err(|e| TaskingError::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    for r in &stream {
        r.validate()?;
    }
    Ok(stream)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: TaskId,
    pub start: LocationId,
    pub end: LocationId,
    pub deadline: f64,
    pub arrival: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VisitKind {
    Pickup,
    Dropoff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Visit {
    pub location: LocationId,
    pub task: TaskId,
    pub kind: VisitKind,
}

/// A robot as seen by a solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverRobot {
    pub id: RobotId,
    pub location: LocationId,
    pub available_at: f64,
    /// Pickup already under way; stays first in the sequence.
    pub committed: Option<TaskId>,
    /// Picked up, awaiting drop-off.
    pub carrying: Vec<TaskId>,
}

impl SolverRobot {
    pub fn idle(id: RobotId, location: LocationId, available_at: f64) -> Self {
        Self { id, location, available_at, committed: None, carrying: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocationProblem {
    pub robots: Vec<SolverRobot>,
    /// Every open task, including committed and carried ones.
    pub tasks: Vec<Task>,
    pub now: f64,
}

impl AllocationProblem {
    pub fn task(&self, id: TaskId) -> Option<&Task> {
        self.tasks.iter().find(|t| t.id == id)
    }

    /// Tasks not bound to any robot, sorted by id.
    pub fn free_tasks(&self) -> Vec<Task> {
        let bound: Vec<TaskId> = self
            .robots
            .iter()
            .flat_map(|r| r.committed.iter().chain(r.carrying.iter()).copied())
            .collect();
        let mut v: Vec<Task> = self.tasks.iter().filter(|t| !bound.contains(&t.id)).copied().collect();
        v.sort_by_key(|t| t.id);
        v
    }

    fn validate(&self, g: &TravelTimeGraph) -> Result<(), TaskingError> {
        for r in &self.robots {
            if !g.contains(r.location) {
                return Err(TaskingError::UnknownLocation(r.location));
            }
            for id in r.committed.iter().chain(&r.carrying) {
                if self.task(*id).is_none() {
                    return Err(TaskingError::InvalidTask(format!("{} bound to {} is not open", id, r.id)));
                }
            }
        }
        for t in &self.tasks {
            for l in [t.start, t.end] {
                if !g.contains(l) {
                    return Err(TaskingError::UnknownLocation(l));
                }
            }
        }
        Ok(())
    }

    /// Visits a robot must make regardless of new assignments, pinned pickup first.
    fn mandatory_visits(&self, r: &SolverRobot) -> Vec<Visit> {
        let mut out = Vec::new();
        if let Some(id) = r.committed {
            let t = self.task(id).unwrap();
            out.push(Visit { location: t.start, task: id, kind: VisitKind::Pickup });
            out.push(Visit { location: t.end, task: id, kind: VisitKind::Dropoff });
        }
        for &id in &r.carrying {
            let t = self.task(id).unwrap();
            out.push(Visit { location: t.end, task: id, kind: VisitKind::Dropoff });
        }
        out
    }
}

/// Per-robot visit sequences and their predicted arrival times.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Allocation {
    pub sequences: BTreeMap<RobotId, Vec<Visit>>,
    pub predicted_times: BTreeMap<RobotId, Vec<f64>>,
    /// Tasks no robot can finish by their deadline.
    pub unassigned: Vec<TaskId>,
}

impl Allocation {
    pub fn locations(&self, robot: RobotId) -> Vec<LocationId> {
        self.sequences.get(&robot).map(|s| s.iter().map(|v| v.location).collect()).unwrap_or_default()
    }

    /// Latest predicted arrival; `now` when nothing is scheduled.
    pub fn makespan(&self, now: f64) -> f64 {
        self.predicted_times.values().flat_map(|t| t.last()).copied().fold(now, f64::max)
    }

    pub fn assigned_robot(&self, task: TaskId) -> Option<RobotId> {
        self.sequences.iter().find(|(_, s)| s.iter().any(|v| v.task == task)).map(|(r, _)| *r)
    }

    /// Precedence and single-assignment check against `tasks`.
    pub fn validate(&self, problem: &AllocationProblem) -> Result<(), String> {
        let mut seen: BTreeMap<TaskId, RobotId> = BTreeMap::new();
        for (r, seq) in &self.sequences {
            let robot = problem.robots.iter().find(|x| x.id == *r).ok_or(format!("unknown {r}"))?;
            for (k, v) in seq.iter().enumerate() {
                if let Some(other) = seen.insert(v.task, *r) {
                    if other != *r {
                        return Err(format!("{} assigned to {other} and {r}", v.task));
                    }
                }
                if v.kind == VisitKind::Dropoff {
                    let carried = robot.carrying.contains(&v.task);
                    let picked = seq[..k].iter().any(|p| p.task == v.task && p.kind == VisitKind::Pickup);
                    if !carried && !picked {
                        return Err(format!("{} dropped before pickup", v.task));
                    }
                }
            }
        }
        for t in &problem.tasks {
            if seen.contains_key(&t.id) == self.unassigned.contains(&t.id) {
                return Err(format!("{} must be assigned exactly once or reported unassigned", t.id));
            }
        }
        Ok(())
    }
}

/// Predicted arrival times along `seq`, starting from the robot's location.
pub fn chain_times(robot: &SolverRobot, seq: &[Visit], g: &TravelTimeGraph) -> Result<Vec<f64>, TaskingError> {
    let mut t = robot.available_at;
    let mut at = robot.location;
    let mut out = Vec::with_capacity(seq.len());
    for v in seq {
        t += g.weight(at, v.location)?;
        at = v.location;
        out.push(t);
    }
    Ok(out)
}

/// Pluggable allocation backend.
pub trait AllocationSolver {
    fn solve(&self, problem: &AllocationProblem, g: &TravelTimeGraph) -> Result<Allocation, TaskingError>;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn task_stream_matches_request_format() {
        let text = r#"[{"arrival": 40, "tasks": [
            {"start": 3, "end": 0, "deadline": 150},
            {"start": 2, "end": 1, "deadline": 300}]}]"#;
        let s = parse_task_stream(text).unwrap();
        assert_eq!(s[0].arrival, 40.0);
        assert_eq!(s[0].tasks[1], TaskSpec { start: 2, end: 1, deadline: 300.0 });
    }

    #[test]
    fn task_stream_rejects_bad_tasks() {
        assert!(parse_task_stream(r#"[{"arrival": 40, "tasks": [{"start": 3, "end": 3, "deadline": 150}]}]"#).is_err());
        assert!(parse_task_stream(r#"[{"arrival": 40, "tasks": [{"start": 3, "end": 0, "deadline": 40}]}]"#).is_err());
        assert!(parse_task_stream(r#"[{"arrival": 40, "tasks": [{"start": 3, "end": 0, "dl": 50}]}]"#).is_err());
    }
}
