use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::{
    solve_exact, solve_greedy, Allocation, AllocationProblem, SolverRobot, Task, TaskRequest, TaskingError,
    TravelTimeGraph,
};
use crate::ids::{LocationId, RobotId, TaskId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    /// Exact search within its caps, greedy when infeasible or too large.
    #[default]
    Auto,
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TaskStatus {
    Pending,
    Assigned { robot: RobotId },
    PickedUp { robot: RobotId, time: f64 },
    Completed { robot: RobotId, time: f64 },
    Missed { time: f64 },
    Unassigned { time: f64 },
}

impl TaskStatus {
    pub fn is_terminal(&self) -> bool {
        matches!(self, TaskStatus::Completed { .. } | TaskStatus::Missed { .. } | TaskStatus::Unassigned { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskState {
    pub task: Task,
    pub status: TaskStatus,
}

/// Actual arrival of a robot at a system location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrivalRecord {
    pub robot: RobotId,
    pub location: LocationId,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispatchOutcome {
    pub allocation: Allocation,
    pub solver: &'static str,
    /// Tasks newly declared unassigned by this solve.
    pub unassigned: Vec<TaskId>,
}

/// Owns the task lifecycle and re-solves whenever a batch arrives.
#[derive(Debug, Clone, Default)]
pub struct Dispatcher {
    pub choice: SolverChoice,
    tasks: BTreeMap<TaskId, TaskState>,
    allocation: Allocation,
    feedback: Vec<ArrivalRecord>,
}

impl Dispatcher {
    pub fn new(choice: SolverChoice) -> Self {
        Self { choice, ..Self::default() }
    }

    /// Registers a request; ids continue from the previous batch.
    pub fn submit(&mut self, request: &TaskRequest) -> Vec<TaskId> {
        let mut ids = Vec::new();
        for spec in &request.tasks {
            let id = TaskId(self.tasks.len());
            let task = Task { id, start: spec.start, end: spec.end, deadline: spec.deadline, arrival: request.arrival };
            self.tasks.insert(id, TaskState { task, status: TaskStatus::Pending });
            ids.push(id);
        }
        ids
    }

    pub fn tasks(&self) -> &BTreeMap<TaskId, TaskState> {
        &self.tasks
    }

    pub fn task(&self, id: TaskId) -> Option<&TaskState> {
        self.tasks.get(&id)
    }

    pub fn allocation(&self) -> &Allocation {
        &self.allocation
    }

    pub fn feedback(&self) -> &[ArrivalRecord] {
        &self.feedback
    }

    pub fn open_tasks(&self) -> Vec<Task> {
        self.tasks.values().filter(|s| !s.status.is_terminal()).map(|s| s.task).collect()
    }

    /// Re-solves over every open task. `robots` carry location, availability and
    /// commitment; carried tasks are filled in from the lifecycle.
    pub fn dispatch(&mut self, robots: &[SolverRobot], g: &TravelTimeGraph, now: f64) -> Result<DispatchOutcome, TaskingError> {
        let mut robots = robots.to_vec();
        for r in &mut robots {
            r.carrying = self
                .tasks
                .values()
                .filter(|s| matches!(s.status, TaskStatus::PickedUp { robot, .. } if robot == r.id))
                .map(|s| s.task.id)
                .collect();
            if r.committed.is_some_and(|id| r.carrying.contains(&id) || self.tasks.get(&id).map_or(true, |s| s.status.is_terminal())) {
                r.committed = None;
            }
        }
        let problem = AllocationProblem { robots, tasks: self.open_tasks(), now };
        let (allocation, solver) = match self.choice {
            SolverChoice::Greedy => (solve_greedy(&problem, g)?, "greedy"),
            SolverChoice::Auto => match solve_exact(&problem, g) {
                Ok(a) => (a, "exact"),
                Err(TaskingError::Infeasible | TaskingError::TooLarge { .. }) => (solve_greedy(&problem, g)?, "greedy"),
                Err(e) => return Err(e),
            },
        };
        for (robot, seq) in &allocation.sequences {
            for v in seq {
                let s = self.tasks.get_mut(&v.task).unwrap();
                if !matches!(s.status, TaskStatus::PickedUp { .. }) {
                    s.status = TaskStatus::Assigned { robot: *robot };
                }
            }
        }
        for id in &allocation.unassigned {
            self.tasks.get_mut(id).unwrap().status = TaskStatus::Unassigned { time: now };
        }
        self.allocation = allocation.clone();
        Ok(DispatchOutcome { unassigned: allocation.unassigned.clone(), allocation, solver })
    }

    pub fn on_pickup(&mut self, id: TaskId, robot: RobotId, time: f64) {
        if let Some(s) = self.tasks.get_mut(&id) {
            if !s.status.is_terminal() {
                s.status = TaskStatus::PickedUp { robot, time };
            }
        }
    }

    pub fn on_dropoff(&mut self, id: TaskId, robot: RobotId, time: f64) {
        if let Some(s) = self.tasks.get_mut(&id) {
            if !s.status.is_terminal() {
                s.status = TaskStatus::Completed { robot, time };
            }
        }
    }

    /// Marks open tasks whose deadline is strictly before `now`; returns them.
    pub fn expire(&mut self, now: f64) -> Vec<TaskId> {
        let mut out = Vec::new();
        for s in self.tasks.values_mut() {
            if !s.status.is_terminal() && s.task.deadline < now {
                s.status = TaskStatus::Missed { time: now };
                out.push(s.task.id);
            }
        }
        out
    }

    pub fn record_arrival(&mut self, robot: RobotId, location: LocationId, time: f64) {
        self.feedback.push(ArrivalRecord { robot, location, time });
    }
}
