//! One checker per acceptance criterion. Each returns a one-line summary on
//! success and the first violation on failure.

use glam::DVec2;
use rand::Rng;
use std::collections::BTreeMap;
use std::time::Instant;

use super::*;
use mrta_sim::dynamics::step_robot;
use mrta_sim::engine::{run, run_with, RunOptions, Scenario};
use mrta_sim::navigation::{ReleaseOutcome, RoomQueue};
use mrta_sim::planner::{plan, units_to_cost, PlanError, PlannerParams};
use mrta_sim::safety_control::{solve_cluster_qp, ControlDecision, QpStatus};
use mrta_sim::tasking::solve_exact;
use mrta_sim::world::{load_map, raycast, ObstaclePointSet, OccupancyGrid, Pose2};

pub type Outcome = Result<String, String>;

// ---------------------------------------------------------------- 1: QP time

/// Robots in a 3 m wide corridor closing on each other, each with its own ray hits.
pub fn corridor_instance(
    r: &mut impl Rng,
    grid: &OccupancyGrid,
    n: usize,
) -> (Vec<RobotId>, BTreeMap<RobotId, RobotState>, BTreeMap<RobotId, Control>, BTreeMap<RobotId, ObstaclePointSet>) {
    let members: Vec<RobotId> = (0..n).map(RobotId).collect();
    let mut states = BTreeMap::new();
    let mut nominals = BTreeMap::new();
    let mut obstacles = BTreeMap::new();
    for (k, &id) in members.iter().enumerate() {
        let x = 8.0 + 1.1 * k as f64 + r.gen_range(-0.1..0.1);
        let y = 2.0 + r.gen_range(-0.6..0.6);
        let theta = if k % 2 == 0 { r.gen_range(-0.4..0.4) } else { std::f64::consts::PI + r.gen_range(-0.4..0.4) };
        let s = RobotState::new(x, y, theta, r.gen_range(0.3..1.0));
        obstacles.insert(id, raycast(grid, Pose2::new(x, y, theta), 16, 3.0).unwrap());
        states.insert(id, s);
        nominals.insert(id, Control::new(r.gen_range(0.5..2.0), r.gen_range(-1.0..1.0)));
    }
    (members, states, nominals, obstacles)
}

pub fn corridor_grid() -> OccupancyGrid {
    // 20 m x 4 m with walls on the long sides.
    let mut m = String::from("map 40 8 0.5 0 0\n");
    for row in 0..8 {
        m.push_str(&if row == 0 || row == 7 { "#".repeat(40) } else { ".".repeat(40) });
        m.push('\n');
    }
    load_map(&m).unwrap()
}

pub struct QpTiming {
    pub first: f64,
    pub mean: f64,
}

pub fn time_qp(n: usize, instances: usize, seed: u64) -> QpTiming {
    let grid = corridor_grid();
    let p = ControllerParams::default();
    let mut r = rng(seed);
    let cases: Vec<_> = (0..instances).map(|_| corridor_instance(&mut r, &grid, n)).collect();
    let (m, s, u, o) = &cases[0];
    let t0 = Instant::now();
    let d = solve_cluster_qp(m, s, u, o, &[], &p).unwrap();
    let first = t0.elapsed().as_secs_f64();
    std::hint::black_box(d);
    let mut total = 0.0;
    let mut count = 0;
    for _ in 0..5 {
        for (m, s, u, o) in &cases {
            let t0 = Instant::now();
            let d = solve_cluster_qp(m, s, u, o, &[], &p).unwrap();
            total += t0.elapsed().as_secs_f64();
            count += 1;
            std::hint::black_box(d);
        }
    }
    QpTiming { first, mean: total / count as f64 }
}

/// Environment variable that turns the ignored probe test into a one-size timing run.
pub const QP_PROBE_ENV: &str = "MRTA_QP_PROBE_AGENTS";

/// Body of the probe: times one cluster size in a process that has not solved a QP yet.
pub fn qp_probe_main() {
    let Ok(n) = std::env::var(QP_PROBE_ENV) else { return };
    let t = time_qp(n.parse().unwrap(), 200, 100 + n.parse::<u64>().unwrap());
    println!("qp-probe first={:e} mean={:e}", t.first, t.mean);
}

/// Re-runs the current test binary's probe in a fresh process and parses `(first, mean)`.
fn fresh_process_timing(probe_test: &str, n: usize) -> Result<(f64, f64), String> {
    let exe = std::env::current_exe().map_err(|e| e.to_string())?;
    let out = std::process::Command::new(exe)
        .args(["--exact", probe_test, "--include-ignored", "--nocapture", "--test-threads", "1"])
        .env(QP_PROBE_ENV, n.to_string())
        .output()
        .map_err(|e| e.to_string())?;
    let text = String::from_utf8_lossy(&out.stdout);
    let line = text.lines().find_map(|l| l.split_once("qp-probe ").map(|(_, rest)| rest)).ok_or(format!("probe printed no timing ({}): {text} {}", out.status, String::from_utf8_lossy(&out.stderr)))?;
    let field = |k: &str| -> Result<f64, String> {
        line.split_whitespace()
            .find_map(|f| f.strip_prefix(k))
            .and_then(|v| v.parse().ok())
            .ok_or(format!("bad probe line {line}"))
    };
    Ok((field("first=")?, field("mean=")?))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// Each size is timed in 5 fresh processes; a single first call is one noisy
/// microsecond sample, so the median over processes is compared.
pub fn qp_compute_time(probe_test: &str) -> Outcome {
    let mut means = Vec::new();
    let mut ratios = Vec::new();
    for n in 1..=3 {
        let runs = (0..5).map(|_| fresh_process_timing(probe_test, n)).collect::<Result<Vec<_>, _>>()?;
        means.push(median(runs.iter().map(|r| r.1).collect()));
        ratios.push(median(runs.iter().map(|r| r.0 / r.1).collect()));
    }
    let detail = format!(
        "median steady mean 1/2/3 = {:.2e}/{:.2e}/{:.2e} s, median first/steady = {:.1}/{:.1}/{:.1}",
        means[0], means[1], means[2], ratios[0], ratios[1], ratios[2]
    );
    if means.iter().any(|&m| m >= 0.05) {
        return Err(format!("a mean solve time reaches 0.05 s: {detail}"));
    }
    if !(means[0] < means[1] && means[0] < means[2]) {
        return Err(format!("1-agent is not fastest: {detail}"));
    }
    let ratio = means[1].max(means[2]) / means[1].min(means[2]);
    if ratio > 2.0 {
        return Err(format!("2- and 3-agent differ by {ratio:.2}x: {detail}"));
    }
    if ratios.iter().any(|&r| r >= 5.0) {
        return Err(format!("first call not below 5x steady state: {detail}"));
    }
    Ok(detail)
}

// ---------------------------------------------------------------- 2: real-time factor

pub fn with_robot_count(s: &Scenario, n: usize) -> Scenario {
    let mut s = s.clone();
    s.robots.truncate(n);
    s
}

fn rtf(s: &Scenario) -> f64 {
    (0..3)
        .map(|_| {
            let t0 = Instant::now();
            let trace = run_with(s, RunOptions::default()).unwrap();
            std::hint::black_box(trace);
            s.config.duration / t0.elapsed().as_secs_f64()
        })
        .fold(0.0, f64::max)
}

pub fn real_time_factor() -> Outcome {
    let base = load_bundled("warehouse");
    let f: Vec<f64> = [2, 4, 6].iter().map(|&n| rtf(&with_robot_count(&base, n))).collect();
    let detail = format!("RTF 2/4/6 robots = {:.0}/{:.0}/{:.0}", f[0], f[1], f[2]);
    if f[2] < 1.0 {
        return Err(format!("6-robot run slower than real time: {detail}"));
    }
    if !(f[0] >= f[1] && f[1] >= f[2]) {
        return Err(format!("factor increases with robot count: {detail}"));
    }
    Ok(detail)
}

// ---------------------------------------------------------------- 3: safety

pub fn safety_suite() -> Outcome {
    let mut worst_sep = f64::INFINITY;
    let mut worst_lethal = f64::INFINITY;
    let (mut ticks, mut fallback) = (0, 0);
    let p = ControllerParams::default();
    for seed in 0..20 {
        let src = random_four_robot_sources(seed, 60.0);
        let s = Scenario::from_sources(&src).map_err(|e| format!("seed {seed}: {e}"))?;
        let trace = run(&s).map_err(|e| format!("seed {seed}: {e}"))?;
        let rep = safety_report(&trace, &s.grid);
        if rep.min_separation < p.r_safe - 0.05 {
            return Err(format!("seed {seed}: robot separation {:.4} m", rep.min_separation));
        }
        if rep.min_lethal_distance < p.r_robot - 0.05 {
            return Err(format!("seed {seed}: lethal-cell distance {:.4} m", rep.min_lethal_distance));
        }
        worst_sep = worst_sep.min(rep.min_separation);
        worst_lethal = worst_lethal.min(rep.min_lethal_distance);
        ticks += rep.ticks;
        fallback += rep.fallback_ticks;
    }
    let frac = fallback as f64 / ticks as f64;
    let detail = format!("min separation {worst_sep:.3} m, min lethal distance {worst_lethal:.3} m, fallback {fallback}/{ticks} ticks");
    if frac > 0.01 {
        return Err(format!("fallback fraction {frac:.4} above 1%: {detail}"));
    }
    Ok(detail)
}

// ---------------------------------------------------------------- 4: queues

/// Warehouse run with a random stream that keeps sending robots into the same rooms.
pub fn crowded_warehouse(seed: u64) -> Scenario {
    let dir = data_dir();
    let read = |f: &str| std::fs::read_to_string(dir.join(f)).unwrap();
    let mut r = rng(seed);
    let mut requests = Vec::new();
    for k in 0..3 {
        let arrival = 2.0 + 15.0 * k as f64;
        let tasks: Vec<String> = (0..3)
            .map(|_| {
                let s = r.gen_range(0..6);
                let e = if r.gen_bool(0.5) { (s + 3) % 6 } else { (s + r.gen_range(1..6)) % 6 };
                format!(r#"{{"start": {s}, "end": {e}, "deadline": {}}}"#, arrival + 400.0)
            })
            .collect();
        requests.push(format!(r#"{{"arrival": {arrival}, "tasks": [{}]}}"#, tasks.join(", ")));
    }
    let src = ScenarioSources {
        config: read("warehouse.yaml").replace("seed: 1", &format!("seed: {seed}")),
        map: read("warehouse_map.txt"),
        tasks: Some(format!("[{}]", requests.join(", "))),
        travel_times: Some(read("warehouse_travel_times.txt")),
    };
    Scenario::from_sources(&src).unwrap()
}

/// Drives a queue with random requests, releases and withdrawals and checks it
/// against a plain FIFO list. Returns the number of grants observed.
pub fn fifo_interleaving(seed: u64) -> Result<usize, String> {
    let mut r = rng(seed);
    let capacity = r.gen_range(1..=4);
    let slots = (0..capacity).map(|k| DVec2::new(k as f64, 0.0)).collect();
    let mut q = RoomQueue::new(0, slots);
    let mut model: Vec<RobotId> = Vec::new();
    let mut grants = Vec::new();
    let mut expected_grants = Vec::new();
    let mut prev_holder = None;
    for _ in 0..60 {
        let robot = RobotId(r.gen_range(0..6));
        match r.gen_range(0..3) {
            0 => {
                let res = q.request_slot(robot);
                if model.contains(&robot) {
                    if res != Ok(model.iter().position(|&x| x == robot).unwrap()) {
                        return Err(format!("seed {seed}: repeat request moved {robot}"));
                    }
                } else if model.len() >= capacity {
                    if res.is_ok() {
                        return Err(format!("seed {seed}: request granted beyond capacity"));
                    }
                } else {
                    model.push(robot);
                    if res != Ok(model.len() - 1) {
                        return Err(format!("seed {seed}: {robot} not appended at the tail"));
                    }
                    if model.len() == 1 {
                        expected_grants.push(robot);
                    }
                }
            }
            1 => {
                let Some(&holder) = model.first() else { continue };
                let out = q.release(holder, DVec2::new(10.0, 0.0), DVec2::ZERO, 2.0, false);
                model.remove(0);
                if let Some(&next) = model.first() {
                    expected_grants.push(next);
                }
                if out != (ReleaseOutcome::Released { promoted: model.first().copied() }) {
                    return Err(format!("seed {seed}: release of {holder} gave {out:?}"));
                }
            }
            _ => {
                let ok = q.withdraw(robot);
                let waiting = model.iter().skip(1).any(|&x| x == robot);
                if ok != waiting {
                    return Err(format!("seed {seed}: withdraw of {robot} returned {ok}"));
                }
                model.retain(|&x| x != robot || !waiting);
            }
        }
        if q.occupants() != model.as_slice() || q.holder() != model.first().copied() {
            return Err(format!("seed {seed}: queue {:?} differs from FIFO {:?}", q.occupants(), model));
        }
        if q.holder() != prev_holder {
            grants.extend(q.holder());
            prev_holder = q.holder();
        }
    }
    if grants != expected_grants {
        return Err(format!("seed {seed}: grant order {grants:?}, expected {expected_grants:?}"));
    }
    Ok(grants.len())
}

pub fn queue_mutual_exclusion() -> Outcome {
    let mut runs: Vec<(String, Scenario)> = vec![("four_rooms".into(), load_bundled("four_rooms")), ("warehouse".into(), load_bundled("warehouse"))];
    for seed in 1..=3 {
        runs.push((format!("crowded warehouse {seed}"), crowded_warehouse(seed)));
    }
    let mut ticks = 0;
    for (name, s) in &runs {
        let trace = run(s).map_err(|e| format!("{name}: {e}"))?;
        let occ = max_room_occupancy(&trace);
        if occ > 1 {
            return Err(format!("{name}: {occ} robots inside one room"));
        }
        ticks += positions_by_tick(&trace).len();
    }
    let mut grants = 0;
    for seed in 0..500 {
        grants += fifo_interleaving(seed)?;
    }
    Ok(format!("{} room scenarios ({ticks} ticks) never exceed 1 robot per room; 500 interleavings, {grants} grants in FIFO order", runs.len()))
}

// ---------------------------------------------------------------- 5: allocation

pub fn allocation_equivalence(instances: u64) -> Outcome {
    let mut solver_time = 0.0;
    let mut feasible = 0;
    for seed in 0..instances {
        let inst = random_alloc_instance(&mut rng(5000 + seed));
        let t0 = Instant::now();
        let got = solve_exact(&inst.problem, &inst.graph);
        solver_time += t0.elapsed().as_secs_f64();
        let want = brute_force_makespan(&inst.problem, &inst.graph);
        match (got, want) {
            (Ok(a), Some(m)) => {
                a.validate(&inst.problem).map_err(|e| format!("seed {seed}: {e}"))?;
                if a.makespan(inst.problem.now) != m {
                    return Err(format!("seed {seed}: makespan {} vs oracle {m}", a.makespan(inst.problem.now)));
                }
                feasible += 1;
            }
            (Err(_), None) => {}
            (got, want) => return Err(format!("seed {seed}: solver {got:?} vs oracle {want:?}")),
        }
    }
    if solver_time >= 5.0 {
        return Err(format!("solver took {solver_time:.2} s"));
    }
    Ok(format!("{instances} instances ({feasible} feasible) match, solver time {solver_time:.3} s"))
}

// ---------------------------------------------------------------- 6: planner

pub fn planner_equivalence(maps: u64) -> Outcome {
    let params = PlannerParams::default();
    let mut solved = 0;
    for seed in 0..maps {
        let mut r = rng(6000 + seed);
        let cm = random_costmap(&mut r);
        let geo = cm.geometry;
        let free: Vec<(usize, usize)> =
            (0..geo.len()).filter(|&i| cm.cost_at_index(i) != COST_LETHAL).map(|i| geo.coords(i)).collect();
        if free.len() < 2 {
            continue;
        }
        let s = free[r.gen_range(0..free.len())];
        let g = free[r.gen_range(0..free.len())];
        let result = plan(&cm, geo.cell_center(s.0, s.1), geo.cell_center(g.0, g.1), &params);
        match (result, dijkstra_units(&cm, s, g, params.cost_weight)) {
            (Ok(path), Some(units)) => {
                if path.total_cost != units_to_cost(units) {
                    return Err(format!("map {seed}: A* {} vs Dijkstra {}", path.total_cost, units_to_cost(units)));
                }
                let mut prev: Option<(usize, usize)> = None;
                for p in &path.points {
                    let c = geo.world_to_cell(*p).ok_or(format!("map {seed}: point off the map"))?;
                    if cm.is_lethal(c.0, c.1) {
                        return Err(format!("map {seed}: path touches lethal cell {c:?}"));
                    }
                    if let Some(q) = prev {
                        if q.0.abs_diff(c.0) > 1 || q.1.abs_diff(c.1) > 1 || q == c {
                            return Err(format!("map {seed}: non-adjacent step {q:?} -> {c:?}"));
                        }
                    }
                    prev = Some(c);
                }
                solved += 1;
            }
            (Err(PlanError::Unreachable), None) => {}
            (got, want) => return Err(format!("map {seed}: planner {got:?} vs Dijkstra {want:?}")),
        }
    }
    Ok(format!("{maps} maps, {solved} reachable pairs, costs identical, no lethal cells on paths"))
}

// ---------------------------------------------------------------- 7: QP

pub struct QpCase {
    pub members: Vec<RobotId>,
    pub states: BTreeMap<RobotId, RobotState>,
    pub nominals: BTreeMap<RobotId, Control>,
    pub obstacles: BTreeMap<RobotId, ObstaclePointSet>,
}

/// A 1- or 2-agent instance whose nominal violates a barrier row while the hard QP stays feasible.
pub fn constrained_qp_case(r: &mut impl Rng, agents: usize, p: &ControllerParams) -> (QpCase, ControlDecision) {
    loop {
        let members: Vec<RobotId> = (0..agents).map(RobotId).collect();
        let mut states = BTreeMap::new();
        let mut nominals = BTreeMap::new();
        let mut obstacles = BTreeMap::new();
        for (k, &id) in members.iter().enumerate() {
            let x = 1.3 * k as f64 + r.gen_range(-0.1..0.1);
            let theta = if k == 0 { r.gen_range(-0.6..0.6) } else { std::f64::consts::PI + r.gen_range(-0.6..0.6) };
            let s = RobotState::new(x, r.gen_range(-0.3..0.3), theta, r.gen_range(0.0..1.0));
            let pts = (0..r.gen_range(1..=3)).map(|_| {
                let ang = theta + r.gen_range(-1.2..1.2);
                s.position() + DVec2::new(ang.cos(), ang.sin()) * r.gen_range(0.7..1.6)
            });
            obstacles.insert(id, ObstaclePointSet::from_points(pts.collect::<Vec<_>>()));
            states.insert(id, s);
            nominals.insert(id, Control::new(r.gen_range(-p.a_max..p.a_max), r.gen_range(-p.omega_max..p.omega_max)));
        }
        let d = solve_cluster_qp(&members, &states, &nominals, &obstacles, &[], p).unwrap();
        let nominal: Vec<f64> = members.iter().flat_map(|id| [nominals[id].a, nominals[id].omega]).collect();
        let binding = d.constraints.iter().any(|c| c.residual(&nominal) < 0.0);
        if d.qp_status == QpStatus::Feasible && binding {
            return (QpCase { members, states, nominals, obstacles }, d);
        }
    }
}

pub fn qp_equivalence() -> Outcome {
    let p = ControllerParams::default();
    let mut r = rng(7000);
    let mut worst_gap = 0.0f64;
    let mut worst_exact = 0.0f64;
    for k in 0..50 {
        let agents = 1 + k % 2;
        let (case, d) = constrained_qp_case(&mut r, agents, &p);
        let u0: Vec<f64> = case.members.iter().flat_map(|id| [case.nominals[id].a, case.nominals[id].omega]).collect();
        let u: Vec<f64> = case.members.iter().flat_map(|id| [d.controls[id].a, d.controls[id].omega]).collect();
        let obj: f64 = u.iter().zip(&u0).map(|(a, b)| (a - b) * (a - b)).sum();
        let rows = qp_rows(&d.constraints, agents, &p);
        for (a, b) in &rows {
            let res = a.iter().zip(&u).map(|(x, y)| x * y).sum::<f64>() - b;
            if res < -1e-8 {
                return Err(format!("instance {k}: residual {res:e}"));
            }
        }
        let (lo, hi): (Vec<f64>, Vec<f64>) = if agents == 1 {
            (vec![-p.a_max, -p.omega_max], vec![p.a_max, p.omega_max])
        } else {
            // Full 4-D grid is out of reach; search a 0.4-wide window around the answer.
            let limit = |i: usize| if i % 2 == 0 { p.a_max } else { p.omega_max };
            (0..4).map(|i| ((u[i] - 0.2).max(-limit(i)), (u[i] + 0.2).min(limit(i)))).unzip()
        };
        let grid = qp_grid(&rows, &u0, &lo, &hi, 0.01).ok_or(format!("instance {k}: grid found no feasible point"))?;
        let gap = obj - grid;
        if gap > 1e-3 {
            return Err(format!("instance {k}: QP objective {obj:.6} exceeds grid {grid:.6}"));
        }
        let (exact, _) = qp_enumeration(&rows, &u0).ok_or(format!("instance {k}: enumeration infeasible"))?;
        if (obj - exact).abs() > 1e-6 {
            return Err(format!("instance {k}: QP objective {obj:.9} vs active-set enumeration {exact:.9}"));
        }
        worst_gap = worst_gap.max(gap);
        worst_exact = worst_exact.max((obj - exact).abs());
    }
    Ok(format!("50 instances: QP minus grid <= {worst_gap:.2e}, |QP - enumeration| <= {worst_exact:.1e}, residuals >= -1e-8"))
}

// ---------------------------------------------------------------- 8: dynamics

pub fn dynamics_accuracy() -> Outcome {
    let mut r = rng(8000);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let s0 = RobotState::new(r.gen_range(-5.0..5.0), r.gen_range(-5.0..5.0), r.gen_range(-3.0..3.0), r.gen_range(-0.5..0.5));
        let u = Control::new(r.gen_range(-0.5..0.5), if r.gen_bool(0.2) { 0.0 } else { r.gen_range(-2.0..2.0) });
        // v stays within +-1 over 1 s, so the speed clamp never engages.
        let mut s = s0;
        for k in 1..=20 {
            s = step_robot(s, u, 0.05, 10.0).map_err(|e| e.to_string())?;
            let want = unicycle_closed_form(s0, u, 0.05 * k as f64);
            worst = worst.max(DVec2::new(s.x - want.x, s.y - want.y).length());
        }
    }
    if worst > 1e-6 {
        return Err(format!("position error {worst:e} m"));
    }
    Ok(format!("50 trajectories, max position error {worst:.1e} m"))
}

// ---------------------------------------------------------------- 9: determinism

pub fn determinism() -> Outcome {
    let mut runs = vec![("four_rooms".to_string(), load_bundled("four_rooms")), ("warehouse".to_string(), load_bundled("warehouse"))];
    runs.push(("random 4-robot".into(), Scenario::from_sources(&random_four_robot_sources(3, 30.0)).unwrap()));
    let mut bytes = 0;
    for (name, s) in &runs {
        let a = run(s).map_err(|e| e.to_string())?.to_text();
        let b = run(s).map_err(|e| e.to_string())?.to_text();
        if a != b {
            return Err(format!("{name}: traces differ"));
        }
        bytes += a.len();
    }
    Ok(format!("{} scenarios run twice, {bytes} trace bytes identical", runs.len()))
}

// ---------------------------------------------------------------- 10: four-room end-to-end

/// Drop-off times from the first verified run of the bundled two-robot scenario.
pub const FOUR_ROOMS_DROPOFFS: [(usize, f64); 2] = [(1, 83.05), (0, 96.6)];

pub fn four_rooms_end_to_end() -> Outcome {
    let s = load_bundled("four_rooms");
    let trace = run(&s).map_err(|e| e.to_string())?;
    let drops = dropoff_times(&trace);
    let got: Vec<(usize, f64)> = drops.iter().map(|(id, t, _)| (id.0, *t)).collect();
    if drops.iter().any(|d| !d.2) || drops.len() != 2 {
        return Err(format!("drop-offs {drops:?}"));
    }
    let deadlines = [150.0, 300.0];
    for &(id, t) in &got {
        if t > deadlines[id] {
            return Err(format!("task {id} finished at {t} after its deadline"));
        }
    }
    if got != FOUR_ROOMS_DROPOFFS {
        return Err(format!("drop-offs {got:?} differ from frozen {FOUR_ROOMS_DROPOFFS:?}"));
    }
    Ok(format!("task 1 done at {} s (deadline 300), task 0 at {} s (deadline 150)", got[0].1, got[1].1))
}
