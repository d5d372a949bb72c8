//! Exact minimum-makespan allocation under hard deadlines.
//!
//! For every robot and every subset of free tasks a depth-first search finds
//! the earliest finishing visit order; candidate visits are tried in ascending
//! `(location, task, kind)` order and only strict improvements replace the
//! incumbent, so the lexicographically smallest optimal order wins. A state
//! `(visited set, location)` reached no earlier than before is pruned: with
//! deadlines as the only time constraints, earlier arrival dominates.
//! A dynamic program over robots and task subsets then minimizes the makespan.

use std::collections::HashMap;

use super::{chain_times, Allocation, AllocationProblem, SolverRobot, Task, TaskingError, TravelTimeGraph, Visit, VisitKind};

pub const EXACT_MAX_TASKS: usize = 8;
pub const EXACT_MAX_ROBOTS: usize = 6;

struct Sequencer<'a> {
    g: &'a TravelTimeGraph,
    visits: Vec<Visit>,
    deadline: Vec<f64>,
    /// Index of the pickup a drop-off waits for.
    requires: Vec<Option<usize>>,
    pinned: Option<usize>,
    memo: HashMap<(u64, usize), f64>,
    best: f64,
    best_seq: Vec<usize>,
    current: Vec<usize>,
}

impl Sequencer<'_> {
    fn dfs(&mut self, done: u64, at: usize, time: f64) {
        let all = (1u64 << self.visits.len()) - 1;
        if done == all {
            if time < self.best {
                self.best = time;
                self.best_seq = self.current.clone();
            }
            return;
        }
        for k in 0..self.visits.len() {
            if done & (1 << k) != 0 {
                continue;
            }
            if let Some(p) = self.pinned {
                if done & (1 << p) == 0 && k != p {
                    continue;
                }
            }
            if let Some(req) = self.requires[k] {
                if done & (1 << req) == 0 {
                    continue;
                }
            }
            let v = self.visits[k];
            let t = time + self.g.weight(at, v.location).unwrap();
            if t > self.deadline[k] || t >= self.best {
                continue;
            }
            let next = done | (1 << k);
            let key = (next, v.location);
            if self.memo.get(&key).is_some_and(|&m| m <= t) {
                continue;
            }
            self.memo.insert(key, t);
            self.current.push(k);
            self.dfs(next, v.location, t);
            self.current.pop();
        }
    }
}

/// Earliest finish time and visit order for `robot` serving its bound tasks plus `extra`.
/// `None` when no order meets the deadlines; `Some((-inf, []))` when there is nothing to do.
fn sequence_robot(
    problem: &AllocationProblem,
    robot: &SolverRobot,
    extra: &[Task],
    g: &TravelTimeGraph,
) -> Option<(f64, Vec<Visit>)> {
    let mandatory = problem.mandatory_visits(robot);
    let pinned_task = robot.committed;
    let mut visits: Vec<Visit> = mandatory;
    for t in extra {
        visits.push(Visit { location: t.start, task: t.id, kind: VisitKind::Pickup });
        visits.push(Visit { location: t.end, task: t.id, kind: VisitKind::Dropoff });
    }
    if visits.is_empty() {
        return Some((f64::NEG_INFINITY, Vec::new()));
    }
    visits.sort();
    let deadline = visits
        .iter()
        .map(|v| match v.kind {
            VisitKind::Pickup => f64::INFINITY,
            VisitKind::Dropoff => problem.task(v.task).unwrap().deadline,
        })
        .collect();
    let requires = visits
        .iter()
        .map(|v| match v.kind {
            VisitKind::Pickup => None,
            VisitKind::Dropoff => visits.iter().position(|p| p.task == v.task && p.kind == VisitKind::Pickup),
        })
        .collect();
    let pinned = pinned_task.and_then(|id| visits.iter().position(|v| v.task == id && v.kind == VisitKind::Pickup));
    let mut s = Sequencer {
        g,
        visits,
        deadline,
        requires,
        pinned,
        memo: HashMap::new(),
        best: f64::INFINITY,
        best_seq: Vec::new(),
        current: Vec::new(),
    };
    s.dfs(0, robot.location, robot.available_at);
    if s.best.is_finite() {
        Some((s.best, s.best_seq.iter().map(|&k| s.visits[k]).collect()))
    } else {
        None
    }
}

/// Minimum-makespan allocation meeting every deadline, or `Infeasible`.
/// Among optimal allocations, robots are filled in id order with the
/// numerically smallest task subset (bit `k` = k-th free task by id).
pub fn solve_exact(problem: &AllocationProblem, g: &TravelTimeGraph) -> Result<Allocation, TaskingError> {
    problem.validate(g)?;
    if problem.tasks.len() > EXACT_MAX_TASKS || problem.robots.len() > EXACT_MAX_ROBOTS {
        return Err(TaskingError::TooLarge { tasks: problem.tasks.len(), robots: problem.robots.len() });
    }
    let mut robots = problem.robots.clone();
    robots.sort_by_key(|r| r.id);
    let free = problem.free_tasks();
    let k = free.len();
    let subsets = 1usize << k;

    // cost[i][s]: finish time of robot i serving subset s (INF if infeasible).
    let mut cost = vec![vec![f64::INFINITY; subsets]; robots.len()];
    let mut seqs: Vec<Vec<Vec<Visit>>> = vec![vec![Vec::new(); subsets]; robots.len()];
    for (i, r) in robots.iter().enumerate() {
        for s in 0..subsets {
            let extra: Vec<Task> = (0..k).filter(|b| s & (1 << b) != 0).map(|b| free[b]).collect();
            if let Some((c, seq)) = sequence_robot(problem, r, &extra, g) {
                cost[i][s] = c;
                seqs[i][s] = seq;
            }
        }
    }

    // best[i][m]: optimal makespan of robots i.. covering subset m.
    let n = robots.len();
    let mut best = vec![vec![f64::INFINITY; subsets]; n + 1];
    best[n][0] = f64::NEG_INFINITY;
    for i in (0..n).rev() {
        for m in 0..subsets {
            let mut v = f64::INFINITY;
            let mut sub = m;
            loop {
                v = v.min(cost[i][sub].max(best[i + 1][m ^ sub]));
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & m;
            }
            best[i][m] = v;
        }
    }
    let full = subsets - 1;
    if best[0][full] == f64::INFINITY {
        return Err(TaskingError::Infeasible);
    }

    let mut alloc = Allocation::default();
    let mut remaining = full;
    for (i, r) in robots.iter().enumerate() {
        let target = best[i][remaining];
        let chosen = (0..=remaining)
            .filter(|s| s & !remaining == 0)
            .find(|&s| cost[i][s].max(best[i + 1][remaining ^ s]) == target)
            .expect("optimal split exists");
        remaining ^= chosen;
        let seq = seqs[i][chosen].clone();
        alloc.predicted_times.insert(r.id, chain_times(r, &seq, g)?);
        alloc.sequences.insert(r.id, seq);
    }
    Ok(alloc)
}
