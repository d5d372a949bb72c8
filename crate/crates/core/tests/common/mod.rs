//! Independent oracles and fixtures shared by the integration tests and the
//! acceptance suite. Nothing here calls the code path it checks.
#![allow(dead_code)]

use glam::DVec2;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::path::PathBuf;

use mrta_sim::dynamics::{Control, RobotState};
use mrta_sim::engine::{Event, Scenario, ScenarioSources, Trace};
use mrta_sim::geom::polygon_contains;
use mrta_sim::ids::{RobotId, TaskId};
use mrta_sim::planner::edge_cost_units;
use mrta_sim::safety_control::{CbfConstraint, ControllerParams};
use mrta_sim::tasking::{AllocationProblem, SolverRobot, Task, TravelTimeGraph};
use mrta_sim::world::{Costmap, GridGeometry, COST_LETHAL};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

pub fn open_map(n: usize) -> String {
    let mut m = format!("map {n} {n} 0.5 0 0\n");
    for _ in 0..n {
        m.push_str(&".".repeat(n));
        m.push('\n');
    }
    m
}

// ---------------------------------------------------------------- planner

/// 20x20 costmap with random lethal blobs and random soft costs.
pub fn random_costmap(r: &mut impl Rng) -> Costmap {
    let geo = GridGeometry::new(20, 20, 1.0, DVec2::ZERO).unwrap();
    let density = r.gen_range(0.0..0.35);
    let cost = (0..geo.len())
        .map(|_| if r.gen_bool(density) { COST_LETHAL } else if r.gen_bool(0.5) { r.gen_range(0..=254) } else { 0 })
        .collect();
    Costmap::from_costs(geo, cost)
}

/// Plain Dijkstra over the 8-connected grid (no lethal targets, no lethal corner
/// cutting), summing the same fixed-point edge weights. `None` when unreachable.
pub fn dijkstra_units(cm: &Costmap, start: (usize, usize), goal: (usize, usize), cost_weight: f64) -> Option<u64> {
    let geo = cm.geometry;
    let (w, h) = (geo.width as i64, geo.height as i64);
    let free = |x: i64, y: i64| x >= 0 && y >= 0 && x < w && y < h && cm.cost(x as usize, y as usize) != COST_LETHAL;
    let mut dist = vec![u64::MAX; geo.len()];
    let s = geo.index(start.0, start.1);
    let g = geo.index(goal.0, goal.1);
    dist[s] = 0;
    let mut heap = BinaryHeap::from([Reverse((0u64, s))]);
    while let Some(Reverse((d, i))) = heap.pop() {
        if d > dist[i] {
            continue;
        }
        if i == g {
            return Some(d);
        }
        let (x, y) = geo.coords(i);
        let (x, y) = (x as i64, y as i64);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if (dx, dy) == (0, 0) || !free(x + dx, y + dy) {
                    continue;
                }
                let diagonal = dx != 0 && dy != 0;
                if diagonal && !(free(x + dx, y) && free(x, y + dy)) {
                    continue;
                }
                let j = geo.index((x + dx) as usize, (y + dy) as usize);
                let nd = d + edge_cost_units(cm.cost_at_index(i), cm.cost_at_index(j), diagonal, cost_weight);
                if nd < dist[j] {
                    dist[j] = nd;
                    heap.push(Reverse((nd, j)));
                }
            }
        }
    }
    None
}

// ---------------------------------------------------------------- QP

/// Rows `a'u >= b` of a filter problem: barrier rows followed by the actuator box.
pub fn qp_rows(constraints: &[CbfConstraint], agents: usize, p: &ControllerParams) -> Vec<(Vec<f64>, f64)> {
    let dim = 2 * agents;
    let mut rows: Vec<(Vec<f64>, f64)> = constraints.iter().map(|c| (c.coeffs.clone(), c.rhs)).collect();
    for k in 0..dim {
        let limit = if k % 2 == 0 { p.a_max } else { p.omega_max };
        let mut lo = vec![0.0; dim];
        lo[k] = 1.0;
        rows.push((lo, -limit));
        let mut hi = vec![0.0; dim];
        hi[k] = -1.0;
        rows.push((hi, -limit));
    }
    rows
}

fn feasible(rows: &[(Vec<f64>, f64)], u: &[f64], tol: f64) -> bool {
    rows.iter().all(|(a, b)| a.iter().zip(u).map(|(x, y)| x * y).sum::<f64>() - b >= -tol)
}

fn sq_dist(u: &[f64], u0: &[f64]) -> f64 {
    u.iter().zip(u0).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Exact minimum of `|u - u0|^2` over the rows by enumerating every candidate
/// active set of size at most `dim` and keeping the best feasible projection.
pub fn qp_enumeration(rows: &[(Vec<f64>, f64)], u0: &[f64]) -> Option<(f64, Vec<f64>)> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut subset: Vec<usize> = Vec::new();
    fn visit(
        start: usize,
        subset: &mut Vec<usize>,
        rows: &[(Vec<f64>, f64)],
        u0: &[f64],
        best: &mut Option<(f64, Vec<f64>)>,
    ) {
        let dim = u0.len();
        let k = subset.len();
        let a = DMatrix::from_fn(k, dim, |r, c| rows[subset[r]].0[c]);
        let u = if k == 0 {
            Some(u0.to_vec())
        } else {
            let rhs = DVector::from_fn(k, |r, _| rows[subset[r]].1 - rows[subset[r]].0.iter().zip(u0).map(|(x, y)| x * y).sum::<f64>());
            let gram = &a * a.transpose();
            gram.cholesky().map(|ch| {
                let lambda = ch.solve(&rhs);
                let step = a.transpose() * lambda;
                u0.iter().zip(step.iter()).map(|(x, s)| x + s).collect()
            })
        };
        if let Some(u) = u {
            if feasible(rows, &u, 1e-9) {
                let f = sq_dist(&u, u0);
                if best.as_ref().map_or(true, |(bf, _)| f < *bf) {
                    *best = Some((f, u));
                }
            }
        }
        if k == dim {
            return;
        }
        for j in start..rows.len() {
            subset.push(j);
            visit(j + 1, subset, rows, u0, best);
            subset.pop();
        }
    }
    visit(0, &mut subset, rows, u0, &mut best);
    best
}

/// Minimum of `|u - u0|^2` over grid points `lo + k * step` inside `[lo, hi]` that satisfy every row.
pub fn qp_grid(rows: &[(Vec<f64>, f64)], u0: &[f64], lo: &[f64], hi: &[f64], step: f64) -> Option<f64> {
    let dim = u0.len();
    let counts: Vec<usize> = (0..dim).map(|k| ((hi[k] - lo[k]) / step + 1e-9).floor() as usize + 1).collect();
    let total: usize = counts.iter().product();
    let mut best: Option<f64> = None;
    let mut u = vec![0.0; dim];
    for mut idx in 0..total {
        for k in 0..dim {
            u[k] = lo[k] + (idx % counts[k]) as f64 * step;
            idx /= counts[k];
        }
        if feasible(rows, &u, 0.0) {
            let f = sq_dist(&u, u0);
            if best.map_or(true, |b| f < b) {
                best = Some(f);
            }
        }
    }
    best
}

// ---------------------------------------------------------------- dynamics

/// Closed-form unicycle state under constant `(a, omega)` from `s0` after `t`.
/// Position integrals of `v(t) e(theta(t))` with `v = v0 + a t`, `theta = theta0 + omega t`.
pub fn unicycle_closed_form(s0: RobotState, u: Control, t: f64) -> RobotState {
    let (v0, th0, a, w) = (s0.v, s0.theta, u.a, u.omega);
    let v = v0 + a * t;
    let th = th0 + w * t;
    // Displacement in the initial heading frame: (c, s) = int_0^t (v0 + a s') (cos w s', sin w s') ds'.
    let (c, sn) = if (w * t).abs() < 0.5 {
        // Power series; the closed form below cancels catastrophically as w -> 0.
        let (mut c, mut sn) = (0.0, 0.0);
        let mut wk = 1.0; // (w t)^k / k!
        for k in 0..30 {
            let term = wk * (v0 * t / (k + 1) as f64 + a * t * t / (k + 2) as f64);
            match k % 4 {
                0 => c += term,
                1 => sn += term,
                2 => c -= term,
                _ => sn -= term,
            }
            wk *= w * t / (k + 1) as f64;
        }
        (c, sn)
    } else {
        // Integrate (v0 + a s) e^{i w s} ds by parts.
        let (sw, cw) = (w * t).sin_cos();
        let c = (v * sw) / w + a * (cw - 1.0) / (w * w);
        let sn = (-v * cw + v0) / w + a * sw / (w * w);
        (c, sn)
    };
    let (s_th, c_th) = th0.sin_cos();
    RobotState { x: s0.x + c * c_th - sn * s_th, y: s0.y + c * s_th + sn * c_th, theta: th, v }
}

// ---------------------------------------------------------------- allocation

pub struct AllocInstance {
    pub problem: AllocationProblem,
    pub graph: TravelTimeGraph,
}

/// At most 3 robots and 4 tasks, integer travel times and deadlines so every
/// chain time is exact in floating point.
pub fn random_alloc_instance(r: &mut impl Rng) -> AllocInstance {
    let n_loc = r.gen_range(2..=5);
    let mut w = vec![vec![0.0; n_loc]; n_loc];
    for i in 0..n_loc {
        for j in i + 1..n_loc {
            let v = r.gen_range(1..=20) as f64;
            w[i][j] = v;
            w[j][i] = v;
        }
    }
    let graph = TravelTimeGraph::new((0..n_loc).collect(), w).unwrap();
    let n_robots = r.gen_range(1..=3);
    let n_tasks = r.gen_range(0..=4);
    let tasks: Vec<Task> = (0..n_tasks)
        .map(|k| {
            let start = r.gen_range(0..n_loc);
            let mut end = r.gen_range(0..n_loc - 1);
            if end >= start {
                end += 1;
            }
            Task { id: TaskId(k), start, end, deadline: r.gen_range(10..=80) as f64, arrival: 0.0 }
        })
        .collect();
    let mut robots: Vec<SolverRobot> = (0..n_robots)
        .map(|i| SolverRobot::idle(RobotId(i), r.gen_range(0..n_loc), r.gen_range(0..=10) as f64))
        .collect();
    // Occasionally bind the first tasks to robots the way the dispatcher does.
    let mut next = 0;
    for robot in robots.iter_mut() {
        if next < tasks.len() && r.gen_bool(0.2) {
            robot.carrying.push(tasks[next].id);
            next += 1;
        } else if next < tasks.len() && r.gen_bool(0.2) {
            robot.committed = Some(tasks[next].id);
            next += 1;
        }
    }
    AllocInstance { problem: AllocationProblem { robots, tasks, now: 0.0 }, graph }
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Pickup,
    Dropoff,
}

/// Earliest finish over every visit order of one robot, `Some(None)` when there is nothing to do.
fn best_robot_finish(p: &AllocationProblem, g: &TravelTimeGraph, robot: &SolverRobot, extra: &[TaskId]) -> Option<Option<f64>> {
    let task = |id: TaskId| p.tasks.iter().find(|t| t.id == id).unwrap();
    let mut visits: Vec<(TaskId, Kind)> = Vec::new();
    for id in robot.committed.iter().chain(extra) {
        visits.push((*id, Kind::Pickup));
        visits.push((*id, Kind::Dropoff));
    }
    for id in &robot.carrying {
        visits.push((*id, Kind::Dropoff));
    }
    if visits.is_empty() {
        return Some(None);
    }
    let mut best: Option<f64> = None;
    permute(&mut visits, 0, &mut |order| {
        if let Some(c) = robot.committed {
            if order[0] != (c, Kind::Pickup) {
                return;
            }
        }
        let mut t = robot.available_at;
        let mut at = robot.location;
        let mut picked: BTreeSet<TaskId> = robot.carrying.iter().copied().collect();
        for &(id, kind) in order {
            let tk = task(id);
            let loc = if kind == Kind::Pickup { tk.start } else { tk.end };
            t += g.weight(at, loc).unwrap();
            at = loc;
            match kind {
                Kind::Pickup => {
                    picked.insert(id);
                }
                Kind::Dropoff => {
                    if !picked.contains(&id) || t > tk.deadline {
                        return;
                    }
                }
            }
        }
        if best.map_or(true, |b| t < b) {
            best = Some(t);
        }
    });
    best.map(Some)
}

fn permute<T: Copy>(v: &mut Vec<T>, k: usize, f: &mut impl FnMut(&[T])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

/// Minimum makespan over every assignment of free tasks and every visit order, or `None` if infeasible.
pub fn brute_force_makespan(p: &AllocationProblem, g: &TravelTimeGraph) -> Option<f64> {
    let bound: BTreeSet<TaskId> = p.robots.iter().flat_map(|r| r.committed.iter().chain(&r.carrying).copied()).collect();
    let free: Vec<TaskId> = p.tasks.iter().map(|t| t.id).filter(|id| !bound.contains(id)).collect();
    let n = p.robots.len();
    let mut best: Option<f64> = None;
    let combos = n.pow(free.len() as u32);
    'assign: for mut code in 0..combos {
        let mut extra: Vec<Vec<TaskId>> = vec![Vec::new(); n];
        for &id in &free {
            extra[code % n].push(id);
            code /= n;
        }
        let mut makespan = p.now;
        for (i, r) in p.robots.iter().enumerate() {
            match best_robot_finish(p, g, r, &extra[i]) {
                None => continue 'assign,
                Some(Some(t)) => makespan = makespan.max(t),
                Some(None) => {}
            }
        }
        if best.map_or(true, |b| makespan < b) {
            best = Some(makespan);
        }
    }
    best
}

// ---------------------------------------------------------------- scenarios

/// Four robots on a 20 m square with random pillars, random locations and tasks.
pub fn random_four_robot_sources(seed: u64, duration: f64) -> ScenarioSources {
    let mut r = rng(seed);
    let n = 40;
    let mut cells = vec![vec![false; n]; n];
    for i in 0..n {
        cells[0][i] = true;
        cells[n - 1][i] = true;
        cells[i][0] = true;
        cells[i][n - 1] = true;
    }
    let mut pillars = Vec::new();
    for _ in 0..r.gen_range(2..=5) {
        let (cx, cy) = (r.gen_range(6..n - 6), r.gen_range(6..n - 6));
        for row in cells.iter_mut().skip(cy).take(2) {
            for c in row.iter_mut().skip(cx).take(2) {
                *c = true;
            }
        }
        // Centre of the 1 m pillar in world coordinates (row 0 is the top).
        pillars.push(DVec2::new(cx as f64 * 0.5 + 0.5, (n - cy) as f64 * 0.5 - 0.5));
    }
    let mut map = format!("map {n} {n} 0.5 0 0\n");
    for row in &cells {
        map.extend(row.iter().map(|&c| if c { '#' } else { '.' }));
        map.push('\n');
    }
    let clear = |p: DVec2, taken: &[DVec2], gap: f64| {
        p.x > 1.5 && p.y > 1.5 && p.x < 18.5 && p.y < 18.5
            && pillars.iter().all(|q| q.distance(p) > 2.0)
            && taken.iter().all(|q| q.distance(p) > gap)
    };
    let mut pick = |taken: &mut Vec<DVec2>, gap: f64| loop {
        let p = DVec2::new(r.gen_range(1.5..18.5), r.gen_range(1.5..18.5));
        if clear(p, taken, gap) {
            taken.push(p);
            return p;
        }
    };
    let mut locations = Vec::new();
    for _ in 0..4 {
        pick(&mut locations, 4.0);
    }
    let mut starts = locations.clone();
    let robots: Vec<DVec2> = (0..4).map(|_| pick(&mut starts, 2.0)).collect();
    let mut config = format!("map: m.txt\nseed: {seed}\nduration: {duration}\nagents:\n");
    for (i, p) in robots.iter().enumerate() {
        let heading: f64 = r.gen_range(-3.1..3.1);
        config.push_str(&format!("  r{i}:\n    start: [{:.3}, {:.3}]\n    heading: {heading:.3}\n", p.x, p.y));
    }
    config.push_str("locations:\n");
    for p in &locations {
        config.push_str(&format!("  - [{:.3}, {:.3}]\n", p.x, p.y));
    }
    let mut tt = String::from("0 1 2 3\n");
    for a in &locations {
        let row: Vec<String> = locations
            .iter()
            .map(|b| if a == b { "0".into() } else { format!("{:.1}", 1.5 * a.distance(*b) + 5.0) })
            .collect();
        tt.push_str(&row.join(" "));
        tt.push('\n');
    }
    let mut requests = Vec::new();
    for k in 0..3 {
        let arrival = 2.0 + 12.0 * k as f64;
        let tasks: Vec<String> = (0..2)
            .map(|_| {
                let s = r.gen_range(0..4);
                let e = (s + r.gen_range(1..4)) % 4;
                format!(r#"{{"start": {s}, "end": {e}, "deadline": {}}}"#, arrival + 200.0)
            })
            .collect();
        requests.push(format!(r#"{{"arrival": {arrival}, "tasks": [{}]}}"#, tasks.join(", ")));
    }
    ScenarioSources {
        config,
        map,
        tasks: Some(format!("[{}]", requests.join(", "))),
        travel_times: Some(tt),
    }
}

pub fn load_bundled(name: &str) -> Scenario {
    mrta_sim::engine::load_scenario(&data_dir().join(format!("{name}.yaml")), None).unwrap()
}

// ---------------------------------------------------------------- trace analysis

/// Robot positions per control tick, in trace order.
pub fn positions_by_tick(trace: &Trace) -> Vec<(f64, BTreeMap<RobotId, DVec2>)> {
    let mut out: Vec<(f64, BTreeMap<RobotId, DVec2>)> = Vec::new();
    for e in &trace.events {
        if let Event::Robot { t, robot, x, y, .. } = e {
            match out.last_mut() {
                Some((lt, m)) if *lt == *t => {
                    m.insert(*robot, DVec2::new(*x, *y));
                }
                _ => out.push((*t, BTreeMap::from([(*robot, DVec2::new(*x, *y))]))),
            }
        }
    }
    out
}

/// Ticks (by time) at which some cluster fell back to the emergency control.
pub fn fallback_ticks(trace: &Trace) -> BTreeMap<u64, BTreeSet<RobotId>> {
    let mut out: BTreeMap<u64, BTreeSet<RobotId>> = BTreeMap::new();
    for e in &trace.events {
        if let Event::Qp { t, members, status, .. } = e {
            if status == "infeasible-fallback" {
                out.entry(t.to_bits()).or_default().extend(members.iter().copied());
            }
        }
    }
    out
}

pub struct SafetyReport {
    pub min_separation: f64,
    pub min_lethal_distance: f64,
    pub ticks: usize,
    pub fallback_ticks: usize,
}

/// Minimum separations over ticks whose state was not produced under a fallback control.
pub fn safety_report(trace: &Trace, grid: &mrta_sim::world::OccupancyGrid) -> SafetyReport {
    let ticks = positions_by_tick(trace);
    let fallback = fallback_ticks(trace);
    let mut tainted: BTreeSet<RobotId> = BTreeSet::new();
    let mut min_sep = f64::INFINITY;
    let mut min_lethal = f64::INFINITY;
    for (t, pos) in &ticks {
        let ids: Vec<RobotId> = pos.keys().copied().collect();
        for (a, &i) in ids.iter().enumerate() {
            if !tainted.contains(&i) {
                min_lethal = min_lethal.min(grid.distance_to_occupied(pos[&i]));
            }
            for &j in &ids[a + 1..] {
                if !tainted.contains(&i) && !tainted.contains(&j) {
                    min_sep = min_sep.min(pos[&i].distance(pos[&j]));
                }
            }
        }
        // A fallback control at this tick shapes the state recorded at the next one.
        tainted = fallback.get(&t.to_bits()).cloned().unwrap_or_default();
    }
    SafetyReport { min_separation: min_sep, min_lethal_distance: min_lethal, ticks: ticks.len(), fallback_ticks: fallback.len() }
}

/// Largest number of robots inside any single room polygon at any tick.
pub fn max_room_occupancy(trace: &Trace) -> usize {
    let rooms: Vec<Vec<DVec2>> = trace
        .header
        .rooms
        .iter()
        .map(|r| r.polygon.iter().map(|p| DVec2::new(p[0], p[1])).collect())
        .collect();
    positions_by_tick(trace)
        .iter()
        .flat_map(|(_, pos)| rooms.iter().map(move |poly| pos.values().filter(|&&p| polygon_contains(poly, p)).count()))
        .max()
        .unwrap_or(0)
}

pub fn dropoff_times(trace: &Trace) -> Vec<(TaskId, f64, bool)> {
    trace
        .events
        .iter()
        .filter_map(|e| match e {
            Event::Dropoff { t, task, deadline_met, .. } => Some((*task, *t, *deadline_met)),
            _ => None,
        })
        .collect()
}
pub mod criteria;
