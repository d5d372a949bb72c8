//! Line-delimited JSON trace: one header record, then events in tick and
//! phase order. Floats are rounded to 9 significant digits on construction so
//! written traces are byte-stable.

use serde::{Deserialize, Serialize};
use std::io::Write;

use super::EngineError;
use crate::geom::round_sig9;
use crate::ids::{LocationId, RobotId, TaskId};

pub const TRACE_FORMAT: &str = "mrta-trace/1";

pub fn r9(x: f64) -> f64 {
    round_sig9(x)
}

pub fn r9p(p: glam::DVec2) -> [f64; 2] {
    [r9(p.x), r9(p.y)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub format: String,
    pub version: String,
    pub scenario_digest: String,
    pub seed: u64,
    pub duration: f64,
    pub control_period: f64,
    pub robots: Vec<String>,
    pub r_robot: f64,
    pub r_safe: f64,
    pub locations: Vec<[f64; 2]>,
    pub rooms: Vec<TraceRoom>,
    /// Map document, so the trace is self-contained for metrics.
    pub map: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRoom {
    pub location: LocationId,
    pub polygon: Vec<[f64; 2]>,
    pub slots: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRecord {
    pub members: Vec<RobotId>,
    pub leader: RobotId,
    pub all_stop: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueueAction {
    Request,
    Full,
    Grant,
    Release,
    Withdraw,
}

/// One trace record. Field order is fixed by declaration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    TaskArrival { t: f64, task: TaskId, start: LocationId, end: LocationId, deadline: f64 },
    Dispatch { t: f64, solver: String, makespan: f64, unassigned: Vec<TaskId> },
    TaskAssigned { t: f64, task: TaskId, robot: RobotId },
    TaskUnassigned { t: f64, task: TaskId },
    Arrival { t: f64, robot: RobotId, location: LocationId },
    Pickup { t: f64, task: TaskId, robot: RobotId },
    Dropoff { t: f64, task: TaskId, robot: RobotId, deadline_met: bool },
    TaskMissed { t: f64, task: TaskId },
    Queue { t: f64, room: LocationId, robot: RobotId, action: QueueAction, index: Option<usize> },
    PlanRequest { t: f64, robot: RobotId, targets: Vec<[f64; 2]> },
    PlanResult { t: f64, robot: RobotId, ok: bool, cost: Option<f64>, points: Vec<[f64; 2]>, error: Option<String> },
    Clusters { t: f64, clusters: Vec<ClusterRecord> },
    Qp { t: f64, leader: RobotId, members: Vec<RobotId>, status: String, max_slack: f64, iterations: usize, duration: Option<f64> },
    Obstacles { t: f64, robot: RobotId, points: Vec<[f64; 2]> },
    Robot { t: f64, robot: RobotId, x: f64, y: f64, theta: f64, v: f64, a: f64, omega: f64 },
    Human { t: f64, human: usize, x: f64, y: f64, vx: f64, vy: f64 },
    Fault { t: f64, robot: RobotId, message: String },
    /// Wall-clock footer, present only when timing is recorded.
    RunTiming { t: f64, wall_clock: f64 },
}

impl Event {
    pub fn time(&self) -> f64 {
        match self {
            Event::TaskArrival { t, .. }
            | Event::Dispatch { t, .. }
            | Event::TaskAssigned { t, .. }
            | Event::TaskUnassigned { t, .. }
            | Event::Arrival { t, .. }
            | Event::Pickup { t, .. }
            | Event::Dropoff { t, .. }
            | Event::TaskMissed { t, .. }
            | Event::Queue { t, .. }
            | Event::PlanRequest { t, .. }
            | Event::PlanResult { t, .. }
            | Event::Clusters { t, .. }
            | Event::Qp { t, .. }
            | Event::Obstacles { t, .. }
            | Event::Robot { t, .. }
            | Event::Human { t, .. }
            | Event::Fault { t, .. }
            | Event::RunTiming { t, .. } => *t,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub header: TraceHeader,
    pub events: Vec<Event>,
}

impl Trace {
    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        serde_json::to_writer(&mut w, &self.header)?;
        w.write_all(b"\n")?;
        for e in &self.events {
            serde_json::to_writer(&mut w, e)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("json is utf-8")
    }

    pub fn parse(text: &str) -> Result<Self, EngineError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or_else(|| EngineError::Trace("trace is empty: missing header".into()))?;
        let header: TraceHeader =
            serde_json::from_str(first).map_err(|e| EngineError::Trace(format!("line 1: invalid header: {e}")))?;
        if header.format != TRACE_FORMAT {
            return Err(EngineError::Trace(format!("unsupported trace format {:?}", header.format)));
        }
        let events = lines
            .map(|(i, l)| serde_json::from_str(l).map_err(|e| EngineError::Trace(format!("line {}: {e}", i + 1))))
            .collect::<Result<Vec<Event>, _>>()?;
        Ok(Self { header, events })
    }

    pub fn read(path: &std::path::Path) -> Result<Self, EngineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| EngineError::Io { path: path.to_path_buf(), message: e.to_string() })?;
        Self::parse(&text)
    }

    pub fn write(&self, path: &std::path::Path) -> Result<(), EngineError> {
        let io = |e: std::io::Error| EngineError::Io { path: path.to_path_buf(), message: e.to_string() };
        let file = std::fs::File::create(path).map_err(io)?;
        let mut w = std::io::BufWriter::new(file);
        self.write_to(&mut w).map_err(io)?;
        w.flush().map_err(io)
    }
}
