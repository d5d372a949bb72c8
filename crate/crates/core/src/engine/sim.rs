//! The deterministic tick loop.

use glam::DVec2;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::time::Instant;

use super::scenario::{RobotSpec, Scenario};
use super::trace::{r9, r9p, ClusterRecord, Event, QueueAction, Trace, TraceHeader, TraceRoom, TRACE_FORMAT};
use super::EngineError;
use crate::coordination::{elect_leaders, form_clusters, neighbor_sets, AscendingId, Cluster, Priority};
use crate::dynamics::{step_human, step_robot, Control, HumanState, RobotState};
use crate::ids::{LocationId, RobotId, TaskId};
use crate::navigation::{
    expand_actions, on_queue_position, record_arrival, QueueFull, ReleaseOutcome, RoomQueue, Waypoint, WaypointKind,
    WaypointPlan,
};
use crate::planner::{lookahead_point, plan_masked, Path};
use crate::safety_control::{
    nominal_leader, nominal_stop, solve_cluster_qp, solve_single_qp, ControlDecision, ControllerParams,
};
use crate::tasking::{collect_travel_times, Aggregation, Dispatcher, SolverRobot, TravelTimeGraph, Visit, VisitKind};
use crate::world::{raycast_masked, ObstaclePointSet, Pose2};

/// What gets recorded besides the always-present state, task and queue events.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Per-solve QP durations and a wall-clock footer. Makes traces non-reproducible.
    pub record_timing: bool,
    pub record_obstacles: bool,
    pub record_humans: bool,
    /// Planned path points in plan results.
    pub record_paths: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { record_timing: false, record_obstacles: true, record_humans: true, record_paths: true }
    }
}

impl RunOptions {
    /// Only state, task and queue events.
    pub fn minimal() -> Self {
        Self { record_timing: false, record_obstacles: false, record_humans: false, record_paths: false }
    }
}

#[derive(Debug, Clone)]
struct RobotRt {
    spec: RobotSpec,
    state: RobotState,
    visits: VecDeque<Visit>,
    plan: WaypointPlan,
    path: Option<Path>,
    path_targets: Vec<DVec2>,
    last_plan_t: f64,
    faulted: bool,
    queue_blocked: bool,
    control: Control,
}

impl RobotRt {
    fn id(&self) -> RobotId {
        self.spec.id
    }

    fn position(&self) -> DVec2 {
        self.state.position()
    }

    /// Location of the first stopping waypoint (visit or queue slot).
    fn next_stop(&self) -> Option<LocationId> {
        self.plan.pending.iter().find_map(|w| match w.kind {
            WaypointKind::Visit { location } => Some(location),
            WaypointKind::Slot { room, .. } => Some(room),
            _ => None,
        })
    }
}

/// Robots clearing a room lead first; ties and everyone else by ascending id.
struct ClearingFirst {
    clearing: BTreeSet<RobotId>,
}

impl Priority for ClearingFirst {
    fn compare(&self, a: RobotId, b: RobotId) -> Ordering {
        self.clearing.contains(&b).cmp(&self.clearing.contains(&a)).then(AscendingId.compare(a, b))
    }
}

/// Simulation state advanced one control tick at a time.
pub struct Engine {
    scenario: Scenario,
    opts: RunOptions,
    tick: usize,
    last_tick: usize,
    robots: Vec<RobotRt>,
    humans: Vec<HumanState>,
    queues: BTreeMap<LocationId, RoomQueue>,
    dispatcher: Dispatcher,
    graph: Option<TravelTimeGraph>,
    next_request: usize,
    events: Vec<Event>,
    last_clusters: Option<Vec<ClusterRecord>>,
    mask_cache: HashMap<u64, Vec<bool>>,
    forbidden: Vec<u64>,
    wall_clock: f64,
}

impl Engine {
    pub fn new(scenario: &Scenario, opts: RunOptions) -> Self {
        let robots = scenario
            .robots
            .iter()
            .map(|spec| RobotRt {
                spec: spec.clone(),
                state: RobotState::new(spec.start.x, spec.start.y, spec.heading, 0.0),
                visits: VecDeque::new(),
                plan: WaypointPlan::new(spec.id),
                path: None,
                path_targets: Vec::new(),
                last_plan_t: f64::NEG_INFINITY,
                faulted: false,
                queue_blocked: false,
                control: Control::ZERO,
            })
            .collect();
        let queues = scenario.rooms.iter().map(|r| (r.location, RoomQueue::new(r.location, r.slots.clone()))).collect();
        let ticks = if scenario.config.duration > 0.0 { scenario.config.last_tick() } else { 0 };
        Self {
            scenario: scenario.clone(),
            opts,
            tick: 0,
            last_tick: ticks,
            robots,
            humans: scenario.humans.clone(),
            queues,
            dispatcher: Dispatcher::new(scenario.config.solver),
            graph: scenario.travel_times.clone(),
            next_request: 0,
            events: Vec::new(),
            last_clusters: None,
            mask_cache: HashMap::new(),
            forbidden: vec![0; scenario.robots.len()],
            wall_clock: 0.0,
        }
    }

    pub fn header(&self) -> TraceHeader {
        let s = &self.scenario;
        TraceHeader {
            format: TRACE_FORMAT.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            scenario_digest: s.digest.clone(),
            seed: s.config.seed,
            duration: s.config.duration,
            control_period: s.config.control_period,
            robots: s.robots.iter().map(|r| r.name.clone()).collect(),
            r_robot: s.controller.r_robot,
            r_safe: s.controller.r_safe,
            locations: s.network.locations().iter().map(|&p| r9p(p)).collect(),
            rooms: s
                .rooms
                .iter()
                .map(|r| TraceRoom {
                    location: r.location,
                    polygon: r.polygon.iter().map(|&p| r9p(p)).collect(),
                    slots: r.slots.iter().map(|&p| r9p(p)).collect(),
                })
                .collect(),
            map: s.map_text.clone(),
        }
    }

    pub fn time(&self) -> f64 {
        self.tick as f64 * self.scenario.config.control_period
    }

    pub fn is_finished(&self) -> bool {
        self.scenario.config.duration <= 0.0 || self.tick > self.last_tick
    }

    pub fn robot_state(&self, id: RobotId) -> Option<RobotState> {
        self.robots.get(id.0).map(|r| r.state)
    }

    pub fn dispatcher(&self) -> &Dispatcher {
        &self.dispatcher
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// True once the robot has no waypoints left.
    pub fn robot_idle(&self, id: RobotId) -> bool {
        self.robots.get(id.0).map_or(true, |r| r.plan.is_empty())
    }

    pub fn robot_plan(&self, id: RobotId) -> Option<&WaypointPlan> {
        self.robots.get(id.0).map(|r| &r.plan)
    }

    pub fn robot_visits(&self, id: RobotId) -> Option<&VecDeque<Visit>> {
        self.robots.get(id.0).map(|r| &r.visits)
    }

    pub fn robot_faulted(&self, id: RobotId) -> bool {
        self.robots.get(id.0).is_some_and(|r| r.faulted)
    }

    /// Sends a robot along `locations` without any task attached.
    pub fn drive_to(&mut self, id: RobotId, locations: &[LocationId]) -> Result<(), EngineError> {
        let r = &mut self.robots[id.0];
        r.plan = expand_actions(id, locations, &self.scenario.network, r.state.position())
            .map_err(|e| EngineError::Scenario(vec![e.to_string()]))?;
        Ok(())
    }

    /// Runs every remaining tick and returns the trace.
    pub fn run(mut self) -> Result<Trace, EngineError> {
        let start = Instant::now();
        while !self.is_finished() {
            self.step()?;
        }
        self.wall_clock += start.elapsed().as_secs_f64();
        Ok(self.into_trace())
    }

    pub fn into_trace(mut self) -> Trace {
        if self.opts.record_timing && self.scenario.config.duration > 0.0 {
            let t = r9(self.last_tick as f64 * self.scenario.config.control_period);
            self.events.push(Event::RunTiming { t, wall_clock: self.wall_clock });
        }
        Trace { header: self.header(), events: self.events }
    }

    /// Advances one control tick.
    pub fn step(&mut self) -> Result<(), EngineError> {
        if self.is_finished() {
            return Ok(());
        }
        let t = self.time();
        self.phase_arrivals(t);
        self.phase_tasks(t)?;
        self.phase_queues(t);
        self.update_forbidden();
        self.phase_planning(t);
        let clusters = self.phase_clusters(t);
        self.phase_control(t, &clusters);
        self.phase_record(t);
        if self.tick < self.last_tick {
            self.phase_integrate(t);
        }
        self.tick += 1;
        Ok(())
    }

    fn fault(&mut self, t: f64, idx: usize, message: String) {
        self.events.push(Event::Fault { t: r9(t), robot: self.robots[idx].id(), message });
    }

    fn rebuild_plan(&mut self, idx: usize) {
        let r = &mut self.robots[idx];
        let locations: Vec<LocationId> = r.visits.iter().map(|v| v.location).collect();
        match expand_actions(r.id(), &locations, &self.scenario.network, r.position()) {
            Ok(mut p) => {
                p.arrivals = std::mem::take(&mut r.plan.arrivals);
                r.plan = p;
            }
            Err(e) => {
                r.plan.pending.clear();
                let msg = e.to_string();
                self.fault(self.time(), idx, msg);
            }
        }
    }

    fn phase_arrivals(&mut self, t: f64) {
        for idx in 0..self.robots.len() {
            let r = &self.robots[idx];
            if r.faulted {
                continue;
            }
            let Some(&w) = r.plan.front() else { continue };
            let p = &r.spec.params;
            let tol = match w.kind {
                WaypointKind::Route => p.d_arrive.max(p.delta),
                WaypointKind::Visit { .. } | WaypointKind::Hold => p.d_arrive,
                WaypointKind::Slot { .. } => continue,
            };
            if r.position().distance(w.position) > tol {
                continue;
            }
            let r = &mut self.robots[idx];
            r.plan.pending.pop_front();
            record_arrival(&mut r.plan, w, t);
            if let WaypointKind::Visit { location } = w.kind {
                let id = r.id();
                self.events.push(Event::Arrival { t: r9(t), robot: id, location });
                self.dispatcher.record_arrival(id, location, t);
                while self.robots[idx].visits.front().is_some_and(|v| v.location == location) {
                    let v = self.robots[idx].visits.pop_front().unwrap();
                    match v.kind {
                        VisitKind::Pickup => {
                            self.dispatcher.on_pickup(v.task, id, t);
                            self.events.push(Event::Pickup { t: r9(t), task: v.task, robot: id });
                        }
                        VisitKind::Dropoff => {
                            let deadline = self.dispatcher.task(v.task).map_or(f64::INFINITY, |s| s.task.deadline);
                            self.dispatcher.on_dropoff(v.task, id, t);
                            self.events.push(Event::Dropoff { t: r9(t), task: v.task, robot: id, deadline_met: t <= deadline });
                        }
                    }
                }
            }
        }
        let missed = self.dispatcher.expire(t);
        if missed.is_empty() {
            return;
        }
        for &task in &missed {
            self.events.push(Event::TaskMissed { t: r9(t), task });
        }
        let missed: BTreeSet<TaskId> = missed.into_iter().collect();
        for idx in 0..self.robots.len() {
            let before = self.robots[idx].visits.len();
            self.robots[idx].visits.retain(|v| !missed.contains(&v.task));
            if self.robots[idx].visits.len() != before {
                self.rebuild_plan(idx);
            }
        }
    }

    fn travel_graph(&mut self) -> Result<TravelTimeGraph, EngineError> {
        if let Some(g) = &self.graph {
            return Ok(g.clone());
        }
        let g = collect_travel_times(&self.scenario, 1, Aggregation::Max)
            .map_err(|e| EngineError::Scenario(vec![e.to_string()]))?;
        self.graph = Some(g.clone());
        Ok(g)
    }

    fn phase_tasks(&mut self, t: f64) -> Result<(), EngineError> {
        let mut arrived = false;
        while let Some(req) = self.scenario.task_stream.get(self.next_request) {
            if req.arrival > t + 1e-9 {
                break;
            }
            let req = req.clone();
            self.next_request += 1;
            for id in self.dispatcher.submit(&req) {
                let task = self.dispatcher.task(id).unwrap().task;
                self.events.push(Event::TaskArrival {
                    t: r9(t),
                    task: id,
                    start: task.start,
                    end: task.end,
                    deadline: r9(task.deadline),
                });
            }
            arrived = true;
        }
        if !arrived {
            return Ok(());
        }
        let g = self.travel_graph()?;
        let net = &self.scenario.network;
        let solver_robots: Vec<SolverRobot> = self
            .robots
            .iter()
            .filter(|r| !r.faulted)
            .map(|r| SolverRobot {
                id: r.id(),
                location: net.nearest_location(r.position()).unwrap_or(0),
                available_at: t,
                committed: r.visits.front().filter(|v| v.kind == VisitKind::Pickup).map(|v| v.task),
                carrying: Vec::new(),
            })
            .collect();
        let previous: BTreeMap<TaskId, RobotId> = self
            .robots
            .iter()
            .flat_map(|r| r.visits.iter().map(move |v| (v.task, r.id())))
            .collect();
        let outcome = self.dispatcher.dispatch(&solver_robots, &g, t).map_err(|e| EngineError::Scenario(vec![e.to_string()]))?;
        self.events.push(Event::Dispatch {
            t: r9(t),
            solver: outcome.solver.to_string(),
            makespan: r9(outcome.allocation.makespan(t)),
            unassigned: outcome.unassigned.clone(),
        });
        let mut assigned = BTreeMap::new();
        for (robot, seq) in &outcome.allocation.sequences {
            for v in seq {
                assigned.insert(v.task, *robot);
            }
        }
        for (&task, &robot) in &assigned {
            if previous.get(&task) != Some(&robot) {
                self.events.push(Event::TaskAssigned { t: r9(t), task, robot });
            }
        }
        for &task in &outcome.unassigned {
            self.events.push(Event::TaskUnassigned { t: r9(t), task });
        }
        for idx in 0..self.robots.len() {
            let id = self.robots[idx].id();
            let Some(seq) = outcome.allocation.sequences.get(&id) else { continue };
            let new: VecDeque<Visit> = seq.iter().copied().collect();
            if new != self.robots[idx].visits {
                self.robots[idx].visits = new;
                self.rebuild_plan(idx);
            }
        }
        Ok(())
    }

    fn phase_queues(&mut self, t: f64) {
        let release_distance = self.scenario.config.release_distance;
        for idx in 0..self.robots.len() {
            let id = self.robots[idx].id();
            let pos = self.robots[idx].position();
            let next_stop = self.robots[idx].next_stop();
            let exhausted = self.robots[idx].visits.is_empty();
            let mut events = Vec::new();
            for (&room, q) in self.queues.iter_mut() {
                if q.position_of(id).is_none() || next_stop == Some(room) {
                    continue;
                }
                if q.holder() == Some(id) {
                    let room_pos = self.scenario.network.location(room).unwrap();
                    if let ReleaseOutcome::Released { promoted } = q.release(id, pos, room_pos, release_distance, exhausted) {
                        events.push(Event::Queue { t: r9(t), room, robot: id, action: QueueAction::Release, index: None });
                        if let Some(p) = promoted {
                            events.push(Event::Queue { t: r9(t), room, robot: p, action: QueueAction::Grant, index: Some(0) });
                        }
                    }
                } else if q.withdraw(id) {
                    events.push(Event::Queue { t: r9(t), room, robot: id, action: QueueAction::Withdraw, index: None });
                }
            }
            self.events.extend(events);

            // Request a slot once nearby.
            let r = &self.robots[idx];
            let mut blocked = false;
            if let (Some(room), Some((slot_room, _))) = (next_stop, r.plan.pending_slot()) {
                if room == slot_room {
                    let q = self.queues.get_mut(&room).unwrap();
                    let room_pos = self.scenario.network.location(room).unwrap();
                    let near = 1.5 * q.slots.last().unwrap().distance(room_pos);
                    if q.position_of(id).is_none() && pos.distance(room_pos) <= near {
                        match q.request_slot(id) {
                            Ok(index) => {
                                self.events.push(Event::Queue { t: r9(t), room, robot: id, action: QueueAction::Request, index: Some(index) });
                                if q.holder() == Some(id) {
                                    self.events.push(Event::Queue { t: r9(t), room, robot: id, action: QueueAction::Grant, index: Some(0) });
                                }
                            }
                            Err(QueueFull) => {
                                blocked = true;
                                if !r.queue_blocked {
                                    self.events.push(Event::Queue { t: r9(t), room, robot: id, action: QueueAction::Full, index: None });
                                }
                            }
                        }
                    }
                }
            }
            self.robots[idx].queue_blocked = blocked;
        }

        // Retarget queued plans as positions change.
        for q in self.queues.values() {
            for (index, &rid) in q.occupants().iter().enumerate() {
                on_queue_position(&mut self.robots[rid.0].plan, q, &self.scenario.network, index);
            }
        }

        // Idle robots inside a room make way.
        for idx in 0..self.robots.len() {
            let r = &self.robots[idx];
            if !r.plan.is_empty() || !r.visits.is_empty() || r.faulted {
                continue;
            }
            if let Some(room) = self.scenario.rooms.iter().find(|room| room.contains(r.position())) {
                let exit = room.exit;
                self.robots[idx].plan.pending.push_back(Waypoint { position: exit, kind: WaypointKind::Hold });
            }
        }
    }

    /// Bitmask of rooms each robot may not enter this tick. The holder also
    /// waits while another robot is still within `r_safe` of the room, so the
    /// two never meet in the doorway.
    fn update_forbidden(&mut self) {
        let margin = self.scenario.controller.r_safe;
        let near: Vec<Vec<(usize, bool)>> = self
            .scenario
            .rooms
            .iter()
            .map(|room| {
                (0..self.robots.len())
                    .filter_map(|i| {
                        let d = room.distance(self.robots[i].position());
                        (d < margin).then_some((i, d == 0.0))
                    })
                    .collect()
            })
            .collect();
        for idx in 0..self.robots.len() {
            let id = self.robots[idx].id();
            let mut mask = 0u64;
            for (k, room) in self.scenario.rooms.iter().enumerate() {
                let holder = self.queues[&room.location].holder() == Some(id);
                let me_inside = near[k].contains(&(idx, true));
                let others_near = near[k].iter().any(|&(i, _)| i != idx);
                let allowed = me_inside || (holder && !others_near);
                if !allowed {
                    mask |= 1 << k;
                }
            }
            self.forbidden[idx] = mask;
        }
    }

    fn mask(&mut self, bits: u64) -> Option<&[bool]> {
        if bits == 0 {
            return None;
        }
        let rooms = &self.scenario.rooms;
        let n = self.scenario.grid.geometry.len();
        let m = self.mask_cache.entry(bits).or_insert_with(|| {
            let mut m = vec![false; n];
            for (k, room) in rooms.iter().enumerate() {
                if bits & (1 << k) != 0 {
                    for &c in &room.cells {
                        m[c] = true;
                    }
                }
            }
            m
        });
        Some(m.as_slice())
    }

    fn in_forbidden_room(&self, idx: usize, p: DVec2) -> bool {
        self.scenario
            .rooms
            .iter()
            .enumerate()
            .any(|(k, room)| self.forbidden[idx] & (1 << k) != 0 && room.contains(p))
    }

    fn phase_planning(&mut self, t: f64) {
        let replan = self.scenario.config.replan_period;
        for idx in 0..self.robots.len() {
            if self.robots[idx].faulted {
                continue;
            }
            // Up to two targets; visits and queue slots are stopping points.
            let mut targets = Vec::new();
            for w in self.robots[idx].plan.next_two() {
                if self.in_forbidden_room(idx, w.position) {
                    break;
                }
                targets.push(w.position);
                if !w.is_route() {
                    break;
                }
            }
            let r = &self.robots[idx];
            if targets.is_empty() {
                self.robots[idx].path = None;
                self.robots[idx].path_targets.clear();
                continue;
            }
            if targets == r.path_targets && t - r.last_plan_t < replan - 1e-9 {
                continue;
            }
            let id = r.id();
            let start = r.position();
            self.events.push(Event::PlanRequest { t: r9(t), robot: id, targets: targets.iter().map(|&p| r9p(p)).collect() });
            let bits = self.forbidden[idx];
            let planner = self.scenario.planner;
            let costmap = self.scenario.costmap.clone();
            let mask = self.mask(bits).map(<[bool]>::to_vec);
            let mut points: Vec<DVec2> = Vec::new();
            let mut cost = 0.0;
            let mut from = start;
            let mut error = None;
            for &goal in &targets {
                match plan_masked(&costmap, mask.as_deref(), from, goal, &planner) {
                    Ok(mut seg) => {
                        *seg.points.last_mut().unwrap() = goal;
                        if !points.is_empty() {
                            seg.points.remove(0);
                        }
                        points.extend(seg.points);
                        cost += seg.total_cost;
                        from = goal;
                    }
                    Err(e) => {
                        error = Some(e.to_string());
                        break;
                    }
                }
            }
            let r = &mut self.robots[idx];
            r.last_plan_t = t;
            r.path_targets = targets;
            let record = self.opts.record_paths;
            match error {
                None => {
                    self.events.push(Event::PlanResult {
                        t: r9(t),
                        robot: id,
                        ok: true,
                        cost: Some(r9(cost)),
                        points: if record { points.iter().map(|&p| r9p(p)).collect() } else { Vec::new() },
                        error: None,
                    });
                    r.path = Some(Path { points, total_cost: cost });
                }
                Some(e) => {
                    r.path = None;
                    self.events.push(Event::PlanResult { t: r9(t), robot: id, ok: false, cost: None, points: Vec::new(), error: Some(e.clone()) });
                    self.fault(t, idx, format!("planner: {e}"));
                }
            }
        }
    }

    fn is_active(&self, idx: usize) -> bool {
        let r = &self.robots[idx];
        // Holding robots (no path: room occupied or planner failure) cannot lead.
        if r.faulted || r.plan.is_empty() || r.queue_blocked || r.path.is_none() {
            return false;
        }
        match r.plan.front().map(|w| w.kind) {
            Some(WaypointKind::Slot { room, .. }) => {
                let waiting = self.queues[&room].holder() != Some(r.id())
                    && r.position().distance(r.plan.front().unwrap().position) <= r.spec.params.d_arrive;
                !waiting
            }
            _ => true,
        }
    }

    /// Near a room it has no business in, typically on its way out.
    fn is_clearing(&self, idx: usize) -> bool {
        let r = &self.robots[idx];
        let next = r.next_stop();
        let d = self.scenario.config.release_distance;
        self.scenario.rooms.iter().any(|room| Some(room.location) != next && room.distance(r.position()) < d)
    }

    fn phase_clusters(&mut self, t: f64) -> Vec<Cluster> {
        let positions: BTreeMap<RobotId, DVec2> =
            self.robots.iter().filter(|r| !r.faulted).map(|r| (r.id(), r.position())).collect();
        let neighbors = neighbor_sets(&positions, self.scenario.config.d_neighbor);
        let partition = form_clusters(&neighbors).expect("neighbor sets are symmetric by construction");
        let active: BTreeSet<RobotId> =
            (0..self.robots.len()).filter(|&i| self.is_active(i)).map(|i| self.robots[i].id()).collect();
        let clearing: BTreeSet<RobotId> = (0..self.robots.len())
            .filter(|&i| self.is_clearing(i))
            .map(|i| self.robots[i].id())
            .collect();
        let mut clusters = elect_leaders(&partition, &active, &ClearingFirst { clearing }).clusters;
        clusters.sort_by_key(|c| c.leader);
        let records: Vec<ClusterRecord> = clusters
            .iter()
            .map(|c| ClusterRecord { members: c.members.clone(), leader: c.leader.unwrap(), all_stop: c.all_stop })
            .collect();
        if self.last_clusters.as_ref() != Some(&records) {
            self.events.push(Event::Clusters { t: r9(t), clusters: records.clone() });
            self.last_clusters = Some(records);
        }
        clusters
    }

    fn stop_control(state: &RobotState, p: &ControllerParams) -> Control {
        let u = nominal_stop(state, p);
        Control::new(u.a.clamp(-p.a_max, p.a_max), 0.0)
    }

    fn phase_control(&mut self, t: f64, clusters: &[Cluster]) {
        let shared = self.scenario.controller;
        for idx in 0..self.robots.len() {
            if self.robots[idx].faulted {
                self.robots[idx].control = Control::ZERO;
            }
        }
        for c in clusters {
            let leader = c.leader.unwrap();
            let members = &c.members;
            let mut nominals = BTreeMap::new();
            let mut states = BTreeMap::new();
            for &m in members {
                let r = &self.robots[m.0];
                let p = &r.spec.params;
                let u = match (&r.path, m == leader && !c.all_stop && self.is_active(m.0)) {
                    (Some(path), true) => match lookahead_point(path, r.position(), p.delta) {
                        Ok(w) => nominal_leader(&r.state, w, p),
                        Err(_) => nominal_stop(&r.state, p),
                    },
                    _ => nominal_stop(&r.state, p),
                };
                nominals.insert(m, u);
                states.insert(m, r.state);
            }
            if members.len() == 1 && self.robots[leader.0].plan.is_empty() {
                let r = &mut self.robots[leader.0];
                r.control = Self::stop_control(&r.state, &shared);
                continue;
            }
            let mut obstacles = BTreeMap::new();
            let mut failed = Vec::new();
            for &m in members {
                let r = &self.robots[m.0];
                let pose = Pose2 { position: r.position(), heading: r.state.theta };
                let (n, range) = (self.scenario.config.n_rays, self.scenario.config.max_range);
                let bits = self.forbidden[m.0];
                let grid = self.scenario.grid.clone();
                let mask = self.mask(bits).map(<[bool]>::to_vec);
                match raycast_masked(&grid, mask.as_deref(), pose, n, range) {
                    Ok(o) => {
                        obstacles.insert(m, o);
                    }
                    Err(e) => failed.push((m, e.to_string())),
                }
            }
            for (m, e) in failed {
                self.fault(t, m.0, format!("sensor: {e}"));
                obstacles.insert(m, ObstaclePointSet::default());
            }
            let started = Instant::now();
            let result = if members.len() == 1 {
                solve_single_qp(leader, &states[&leader], nominals[&leader], &obstacles[&leader], &self.humans, &shared)
            } else {
                solve_cluster_qp(members, &states, &nominals, &obstacles, &self.humans, &shared)
            };
            let elapsed = started.elapsed().as_secs_f64();
            match result {
                Ok(decision) => {
                    let ControlDecision { controls, qp_status, iterations, .. } = &decision;
                    for (&m, &u) in controls {
                        self.robots[m.0].control = u;
                    }
                    self.events.push(Event::Qp {
                        t: r9(t),
                        leader,
                        members: members.clone(),
                        status: qp_status.as_str().to_string(),
                        max_slack: r9(decision.max_slack()),
                        iterations: *iterations,
                        duration: self.opts.record_timing.then_some(elapsed),
                    });
                }
                Err(e) => {
                    for &m in members {
                        let r = &mut self.robots[m.0];
                        r.control = Control::ZERO;
                        r.faulted = true;
                    }
                    for &m in members {
                        self.fault(t, m.0, format!("controller: {e}"));
                    }
                }
            }
            if self.opts.record_obstacles {
                for (m, o) in obstacles {
                    if !o.is_empty() {
                        self.events.push(Event::Obstacles { t: r9(t), robot: m, points: o.points().map(r9p).collect() });
                    }
                }
            }
        }
    }

    fn phase_record(&mut self, t: f64) {
        for r in &self.robots {
            let s = r.state;
            self.events.push(Event::Robot {
                t: r9(t),
                robot: r.id(),
                x: r9(s.x),
                y: r9(s.y),
                theta: r9(s.theta),
                v: r9(s.v),
                a: r9(r.control.a),
                omega: r9(r.control.omega),
            });
        }
        if self.opts.record_humans {
            for (k, h) in self.humans.iter().enumerate() {
                self.events.push(Event::Human {
                    t: r9(t),
                    human: k,
                    x: r9(h.position.x),
                    y: r9(h.position.y),
                    vx: r9(h.velocity.x),
                    vy: r9(h.velocity.y),
                });
            }
        }
    }

    fn phase_integrate(&mut self, t: f64) {
        let cfg = self.scenario.config;
        let hp = self.scenario.human_params;
        let grid = &self.scenario.grid;
        let human_obstacles: Vec<ObstaclePointSet> = self
            .humans
            .iter()
            .map(|h| {
                let heading = if h.velocity.length() > 1e-9 { h.velocity.y.atan2(h.velocity.x) } else { 0.0 };
                raycast_masked(grid, None, Pose2 { position: h.position, heading }, cfg.n_rays, cfg.max_range).unwrap_or_default()
            })
            .collect();
        let mut faults = Vec::new();
        for _ in 0..cfg.substeps() {
            if !self.humans.is_empty() {
                let robot_states: Vec<RobotState> = self.robots.iter().map(|r| r.state).collect();
                let snapshot = self.humans.clone();
                for (k, h) in self.humans.iter_mut().enumerate() {
                    let others: Vec<HumanState> =
                        snapshot.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, o)| o.clone()).collect();
                    if let Ok(next) =
                        step_human(h, &robot_states, self.scenario.controller.r_robot, &others, &human_obstacles[k], cfg.tick_dt, &hp)
                    {
                        *h = next;
                    }
                }
            }
            for (idx, r) in self.robots.iter_mut().enumerate() {
                if r.faulted {
                    continue;
                }
                match step_robot(r.state, r.control, cfg.tick_dt, r.spec.params.v_max) {
                    Ok(s) => r.state = s,
                    Err(e) => {
                        r.faulted = true;
                        faults.push((idx, format!("dynamics: {e}")));
                    }
                }
            }
        }
        for (idx, m) in faults {
            self.fault(t, idx, m);
        }
    }
}

/// Runs a scenario to completion with default recording.
pub fn run(scenario: &Scenario) -> Result<Trace, EngineError> {
    Engine::new(scenario, RunOptions::default()).run()
}

pub fn run_with(scenario: &Scenario, opts: RunOptions) -> Result<Trace, EngineError> {
    Engine::new(scenario, opts).run()
}
