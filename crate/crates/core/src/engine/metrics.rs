//! Run-level statistics recomputed from a trace.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{Event, Trace};
use crate::ids::{LocationId, RobotId, TaskId};
use crate::world::OccupancyGrid;

/// Cluster sizes that always get a QP timing row.
const REPORTED_CLUSTER_SIZES: [usize; 3] = [1, 2, 3];

/// Named metric rows; `None` renders as `NA`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricsReport {
    pub rows: Vec<(String, Option<f64>)>,
}

impl MetricsReport {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.rows.iter().find(|(n, _)| n == name).and_then(|(_, v)| *v)
    }

    pub fn has(&self, name: &str) -> bool {
        self.rows.iter().any(|(n, _)| n == name)
    }

    fn push(&mut self, name: impl Into<String>, value: Option<f64>) {
        self.rows.push((name.into(), value));
    }

    pub fn to_text(&self) -> String {
        let width = self.rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (name, value) in &self.rows {
            writeln!(out, "{name:<width$}  {}", format_value(*value)).unwrap();
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,value\n");
        for (name, value) in &self.rows {
            writeln!(out, "{name},{}", format_value(*value)).unwrap();
        }
        out
    }
}

pub fn format_value(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{}", crate::geom::round_sig9(x)),
        None => "NA".into(),
    }
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

fn max(xs: &[f64]) -> Option<f64> {
    xs.iter().copied().reduce(f64::max)
}

fn min(xs: impl IntoIterator<Item = f64>) -> Option<f64> {
    xs.into_iter().reduce(f64::min)
}

pub fn compute_metrics(trace: &Trace) -> MetricsReport {
    let mut report = MetricsReport::default();
    let events = &trace.events;

    // Tasks.
    let mut arrival: BTreeMap<TaskId, f64> = BTreeMap::new();
    let mut deadline: BTreeMap<TaskId, f64> = BTreeMap::new();
    let (mut completed, mut on_time, mut missed, mut unassigned) = (0usize, 0usize, 0usize, 0usize);
    let mut latencies = Vec::new();
    for e in events {
        match e {
            Event::TaskArrival { t, task, deadline: d, .. } => {
                arrival.insert(*task, *t);
                deadline.insert(*task, *d);
            }
            Event::Dropoff { t, task, deadline_met, .. } => {
                completed += 1;
                on_time += usize::from(*deadline_met);
                if let Some(a) = arrival.get(task) {
                    latencies.push(t - a);
                }
            }
            Event::TaskMissed { .. } => missed += 1,
            Event::TaskUnassigned { .. } => unassigned += 1,
            _ => {}
        }
    }
    let arrived = arrival.len();
    report.push("tasks_arrived", Some(arrived as f64));
    report.push("tasks_completed", Some(completed as f64));
    report.push("tasks_on_time", Some(on_time as f64));
    report.push("tasks_missed", Some(missed as f64));
    report.push("tasks_unassigned", Some(unassigned as f64));
    report.push("deadline_hit_rate", (arrived > 0).then(|| on_time as f64 / arrived as f64));
    report.push("mean_task_latency", mean(&latencies));

    // Control.
    let mut durations: BTreeMap<usize, Vec<f64>> = REPORTED_CLUSTER_SIZES.iter().map(|&n| (n, Vec::new())).collect();
    let (mut solves, mut fallbacks, mut slack) = (0usize, 0usize, 0usize);
    for e in events {
        if let Event::Qp { members, status, duration, .. } = e {
            solves += 1;
            fallbacks += usize::from(status == "infeasible-fallback");
            slack += usize::from(status == "feasible-with-slack");
            let entry = durations.entry(members.len()).or_default();
            if let Some(d) = duration {
                entry.push(*d);
            }
        }
    }
    report.push("qp_solves", Some(solves as f64));
    for (n, ds) in &durations {
        report.push(format!("qp_mean_time_n{n}"), mean(ds));
        report.push(format!("qp_max_time_n{n}"), max(ds));
    }
    report.push("qp_slack_fraction", (solves > 0).then(|| slack as f64 / solves as f64));
    report.push("qp_fallback_fraction", (solves > 0).then(|| fallbacks as f64 / solves as f64));

    // Separation.
    let mut by_tick: BTreeMap<u64, Vec<(RobotId, f64, f64)>> = BTreeMap::new();
    for e in events {
        if let Event::Robot { t, robot, x, y, .. } = e {
            by_tick.entry(t.to_bits()).or_default().push((*robot, *x, *y));
        }
    }
    let pair_min = min(by_tick.values().flat_map(|rs| {
        rs.iter().enumerate().flat_map(move |(i, a)| rs[i + 1..].iter().map(move |b| (a.1 - b.1).hypot(a.2 - b.2)))
    }));
    report.push("min_robot_distance", pair_min);
    let grid = OccupancyGrid::parse(&trace.header.map).ok();
    let obstacle_min = grid.and_then(|g| {
        min(by_tick.values().flatten().map(|&(_, x, y)| g.distance_to_occupied(glam::DVec2::new(x, y))))
            .filter(|d| d.is_finite())
    });
    report.push("min_obstacle_distance", obstacle_min);

    // Time.
    let simulated = events.iter().filter(|e| matches!(e, Event::Robot { .. })).map(Event::time).reduce(f64::max);
    let wall = events.iter().find_map(|e| match e {
        Event::RunTiming { wall_clock, .. } => Some(*wall_clock),
        _ => None,
    });
    report.push("simulated_time", Some(simulated.unwrap_or(0.0)));
    report.push("wall_clock", wall);
    report.push("real_time_factor", wall.filter(|&w| w > 0.0).map(|w| simulated.unwrap_or(0.0) / w));

    // Queues: request to grant.
    let mut requested: BTreeMap<(LocationId, RobotId), f64> = BTreeMap::new();
    let mut waits = Vec::new();
    for e in events {
        if let Event::Queue { t, room, robot, action, .. } = e {
            use super::QueueAction::*;
            match action {
                Request => {
                    requested.insert((*room, *robot), *t);
                }
                Grant => {
                    if let Some(t0) = requested.remove(&(*room, *robot)) {
                        waits.push(t - t0);
                    }
                }
                Withdraw => {
                    requested.remove(&(*room, *robot));
                }
                Release | Full => {}
            }
        }
    }
    report.push("queue_grants", Some(waits.len() as f64));
    report.push("queue_wait_mean", mean(&waits));
    report.push("queue_wait_max", max(&waits));
    report
}
