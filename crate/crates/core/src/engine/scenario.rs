//! Scenario file ingestion and validation.

use glam::DVec2;
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path as FsPath, PathBuf};

use super::EngineError;
use crate::dynamics::{HumanParams, HumanState};
use crate::geom::{polygon_contains, polygon_distance};
use crate::ids::{LocationId, RobotId};
use crate::navigation::RoadwayNetwork;
use crate::planner::PlannerParams;
use crate::safety_control::{ControllerOverrides, ControllerParams};
use crate::tasking::{parse_task_stream, SolverChoice, TaskRequest, TravelTimeGraph};
use crate::world::{inflate, load_map, Costmap, InflationParams, OccupancyGrid, COST_LETHAL};

fn d_duration() -> f64 {
    60.0
}
fn d_tick() -> f64 {
    0.01
}
fn d_control() -> f64 {
    0.05
}
fn d_replan() -> f64 {
    1.0
}
fn d_neighbor() -> f64 {
    3.0
}
fn d_rays() -> usize {
    16
}
fn d_range() -> f64 {
    3.0
}
fn d_release() -> f64 {
    2.0
}

/// Top-level scenario document. Paths are relative to the scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub map: String,
    #[serde(default)]
    pub tasks: Option<String>,
    #[serde(default)]
    pub travel_times: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "d_duration")]
    pub duration: f64,
    #[serde(default = "d_tick")]
    pub tick_dt: f64,
    #[serde(default = "d_control")]
    pub control_period: f64,
    #[serde(default = "d_replan")]
    pub replan_period: f64,
    #[serde(default = "d_neighbor")]
    pub d_neighbor: f64,
    #[serde(default = "d_rays")]
    pub n_rays: usize,
    #[serde(default = "d_range")]
    pub max_range: f64,
    #[serde(default = "d_release")]
    pub release_distance: f64,
    #[serde(default)]
    pub solver: SolverChoice,
    #[serde(default)]
    pub controller: ControllerParams,
    #[serde(default)]
    pub planner: PlannerParams,
    #[serde(default)]
    pub inflation: InflationParams,
    #[serde(default)]
    pub human: HumanParams,
    pub agents: IndexMap<String, AgentSpec>,
    #[serde(default)]
    pub humans: Vec<HumanSpec>,
    #[serde(default)]
    pub locations: Vec<[f64; 2]>,
    #[serde(default)]
    pub rooms: Vec<RoomSpec>,
    #[serde(default)]
    pub roadways: Vec<RoadwaySpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub start: [f64; 2],
    #[serde(default)]
    pub heading: f64,
    #[serde(default)]
    pub controller: ControllerOverrides,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HumanSpec {
    pub start: [f64; 2],
    #[serde(default)]
    pub waypoints: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoomSpec {
    pub location: LocationId,
    pub polygon: Vec<[f64; 2]>,
    pub queue: Vec<[f64; 2]>,
    /// Where idle robots vacate to; defaults to the last queue slot.
    #[serde(default)]
    pub exit: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoadwaySpec {
    pub from: LocationId,
    pub to: LocationId,
    pub waypoints: Vec<[f64; 2]>,
}

fn v(p: [f64; 2]) -> DVec2 {
    DVec2::new(p[0], p[1])
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotSpec {
    pub id: RobotId,
    pub name: String,
    pub start: DVec2,
    pub heading: f64,
    /// Scenario gains with this robot's overrides applied.
    pub params: ControllerParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Room {
    pub location: LocationId,
    pub polygon: Vec<DVec2>,
    pub slots: Vec<DVec2>,
    pub exit: DVec2,
    /// Map cells whose centers lie inside the polygon.
    pub cells: Vec<usize>,
}

impl Room {
    pub fn contains(&self, p: DVec2) -> bool {
        polygon_contains(&self.polygon, p)
    }

    /// 0 inside the polygon.
    pub fn distance(&self, p: DVec2) -> f64 {
        polygon_distance(&self.polygon, p)
    }
}

/// Numeric run settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub duration: f64,
    pub tick_dt: f64,
    pub control_period: f64,
    pub replan_period: f64,
    pub d_neighbor: f64,
    pub n_rays: usize,
    pub max_range: f64,
    pub release_distance: f64,
    pub solver: SolverChoice,
}

impl RunConfig {
    /// Physics substeps per control period.
    pub fn substeps(&self) -> usize {
        (self.control_period / self.tick_dt).round() as usize
    }

    /// Index of the last control tick.
    pub fn last_tick(&self) -> usize {
        (self.duration / self.control_period + 1e-9).floor() as usize
    }
}

/// Fully validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: RunConfig,
    pub controller: ControllerParams,
    pub planner: PlannerParams,
    pub inflation: InflationParams,
    pub human_params: HumanParams,
    pub map_text: String,
    pub grid: OccupancyGrid,
    pub costmap: Costmap,
    pub robots: Vec<RobotSpec>,
    pub humans: Vec<HumanState>,
    pub network: RoadwayNetwork,
    pub rooms: Vec<Room>,
    pub travel_times: Option<TravelTimeGraph>,
    pub task_stream: Vec<TaskRequest>,
    /// Hex SHA-256 over every input document.
    pub digest: String,
}

/// Raw inputs of a scenario, before validation.
#[derive(Debug, Clone, Default)]
pub struct ScenarioSources {
    pub config: String,
    pub map: String,
    pub tasks: Option<String>,
    pub travel_times: Option<String>,
}

fn read(path: &FsPath) -> Result<String, EngineError> {
    std::fs::read_to_string(path).map_err(|e| EngineError::Io { path: path.to_path_buf(), message: e.to_string() })
}

/// Reads a scenario file and the files it references. `tasks` overrides the
/// file's own task-stream reference.
pub fn load_scenario(path: &FsPath, tasks: Option<&FsPath>) -> Result<Scenario, EngineError> {
    let config = read(path)?;
    let file: ScenarioFile = parse_file(&config)?;
    let base = path.parent().map(FsPath::to_path_buf).unwrap_or_default();
    let resolve = |p: &str| -> PathBuf { base.join(p) };
    let map = read(&resolve(&file.map))?;
    let tasks = match (tasks, &file.tasks) {
        (Some(p), _) => Some(read(p)?),
        (None, Some(p)) => Some(read(&resolve(p))?),
        (None, None) => None,
    };
    let travel_times = file.travel_times.as_deref().map(|p| read(&resolve(p))).transpose()?;
    Scenario::from_sources(&ScenarioSources { config, map, tasks, travel_times })
}

fn parse_file(text: &str) -> Result<ScenarioFile, EngineError> {
    serde_yaml::from_str(text).map_err(|e| EngineError::Scenario(vec![format!("scenario file: {e}")]))
}

impl Scenario {
    pub fn from_sources(src: &ScenarioSources) -> Result<Self, EngineError> {
        let file = parse_file(&src.config)?;
        let mut errors = Vec::new();

        let grid = load_map(&src.map).map_err(|e| EngineError::Scenario(vec![format!("map: {e}")]))?;
        let task_stream = match &src.tasks {
            Some(t) => parse_task_stream(t).map_err(|e| EngineError::Scenario(vec![format!("task stream: {e}")]))?,
            None => Vec::new(),
        };
        let travel_times = match &src.travel_times {
            Some(t) => Some(TravelTimeGraph::parse(t).map_err(|e| EngineError::Scenario(vec![format!("travel times: {e}")]))?),
            None => None,
        };

        let config = RunConfig {
            seed: file.seed,
            duration: file.duration,
            tick_dt: file.tick_dt,
            control_period: file.control_period,
            replan_period: file.replan_period,
            d_neighbor: file.d_neighbor,
            n_rays: file.n_rays,
            max_range: file.max_range,
            release_distance: file.release_distance,
            solver: file.solver,
        };
        if !(config.duration >= 0.0 && config.duration.is_finite()) {
            errors.push("duration must be non-negative".to_string());
        }
        if !(config.tick_dt > 0.0) || !(config.control_period > 0.0) {
            errors.push("tick_dt and control_period must be positive".to_string());
        } else {
            let ratio = config.control_period / config.tick_dt;
            if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) || ratio.round() < 1.0 {
                errors.push(format!(
                    "control_period {} is not an integer multiple of tick_dt {}",
                    config.control_period, config.tick_dt
                ));
            }
        }
        if !(config.replan_period > 0.0) {
            errors.push("replan_period must be positive".to_string());
        }
        if !(config.d_neighbor > 0.0) {
            errors.push("d_neighbor must be positive".to_string());
        }
        if config.n_rays == 0 {
            errors.push("n_rays must be at least 1".to_string());
        }
        if let Err(e) = file.controller.validate() {
            errors.push(format!("controller: {e}"));
        }

        let costmap = inflate(&grid, &file.inflation);
        let free_cell = |p: DVec2| {
            grid.geometry
                .world_to_cell(p)
                .is_some_and(|(x, y)| costmap.cost(x, y) != COST_LETHAL)
        };

        let mut network = RoadwayNetwork::new(file.locations.iter().map(|&p| v(p)).collect());
        for (i, &p) in file.locations.iter().enumerate() {
            if !free_cell(v(p)) {
                errors.push(format!("location {i} at ({}, {}) is not on a free cell", p[0], p[1]));
            }
        }
        for r in &file.roadways {
            if let Err(e) = network.add_route(r.from, r.to, r.waypoints.iter().map(|&p| v(p)).collect()) {
                errors.push(format!("roadway: {e}"));
            }
        }

        let mut rooms = Vec::new();
        for (k, r) in file.rooms.iter().enumerate() {
            if r.location >= file.locations.len() {
                errors.push(format!("room {k} references unknown location {}", r.location));
                continue;
            }
            if r.polygon.len() < 3 {
                errors.push(format!("room {k} polygon needs at least 3 vertices"));
                continue;
            }
            if r.queue.is_empty() {
                errors.push(format!("room {k} has no queue slots"));
                continue;
            }
            let polygon: Vec<DVec2> = r.polygon.iter().map(|&p| v(p)).collect();
            let slots: Vec<DVec2> = r.queue.iter().map(|&p| v(p)).collect();
            for (s, &p) in slots.iter().enumerate() {
                if polygon_contains(&polygon, p) || !free_cell(p) {
                    errors.push(format!("room {k} queue slot {s} must be on a free cell outside the room"));
                }
            }
            let exit = r.exit.map(v).unwrap_or(*slots.last().unwrap());
            if polygon_contains(&polygon, exit) || !free_cell(exit) {
                errors.push(format!("room {k} exit must be on a free cell outside the room"));
            }
            if rooms.iter().any(|x: &Room| x.location == r.location) {
                errors.push(format!("room {k} duplicates location {}", r.location));
            }
            let geo = grid.geometry;
            let cells = (0..geo.len())
                .filter(|&i| {
                    let (x, y) = geo.coords(i);
                    polygon_contains(&polygon, geo.cell_center(x, y))
                })
                .collect();
            network.add_queue(r.location, slots.clone()).ok();
            rooms.push(Room { location: r.location, polygon, slots, exit, cells });
        }

        let mut robots = Vec::new();
        for (i, (name, a)) in file.agents.iter().enumerate() {
            let start = v(a.start);
            if !free_cell(start) {
                errors.push(format!("agent {name}: start ({}, {}) is outside the map or on a lethal cell", a.start[0], a.start[1]));
            }
            if rooms.iter().any(|r| r.contains(start)) {
                errors.push(format!("agent {name}: start ({}, {}) is inside a room", a.start[0], a.start[1]));
            }
            let params = a.controller.apply(&file.controller);
            if let Err(e) = params.validate() {
                errors.push(format!("agent {name}: controller {e}"));
            }
            robots.push(RobotSpec { id: RobotId(i), name: name.clone(), start, heading: a.heading, params });
        }
        for (a, ra) in robots.iter().enumerate() {
            for rb in &robots[a + 1..] {
                if ra.start.distance(rb.start) < file.controller.r_safe {
                    errors.push(format!("agents {} and {} start closer than r_safe", ra.name, rb.name));
                }
            }
        }

        let mut humans = Vec::new();
        for (k, h) in file.humans.iter().enumerate() {
            if !grid.geometry.contains(v(h.start)) {
                errors.push(format!("human {k}: start is outside the map"));
            }
            humans.push(HumanState::new(v(h.start), h.waypoints.iter().map(|&p| v(p)).collect()));
        }

        for (r, req) in task_stream.iter().enumerate() {
            for (k, t) in req.tasks.iter().enumerate() {
                for l in [t.start, t.end] {
                    if l >= file.locations.len() {
                        errors.push(format!("task {k} of request {r} (arrival {}) references unknown location {l}", req.arrival));
                    }
                }
            }
        }
        if let Some(g) = &travel_times {
            for l in 0..file.locations.len() {
                if !g.contains(l) {
                    errors.push(format!("travel-time graph is missing location {l}"));
                }
            }
        }

        if !errors.is_empty() {
            return Err(EngineError::Scenario(errors));
        }

        let mut hasher = Sha256::new();
        for part in [Some(&src.config), Some(&src.map), src.tasks.as_ref(), src.travel_times.as_ref()] {
            let bytes = part.map(String::as_bytes).unwrap_or_default();
            hasher.update((bytes.len() as u64).to_le_bytes());
            hasher.update(bytes);
        }
        let digest = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();

        Ok(Scenario {
            config,
            controller: file.controller,
            planner: file.planner,
            inflation: file.inflation,
            human_params: file.human,
            map_text: src.map.clone(),
            grid,
            costmap,
            robots,
            humans,
            network,
            rooms,
            travel_times,
            task_stream,
            digest,
        })
    }

    pub fn room_of_location(&self, l: LocationId) -> Option<&Room> {
        self.rooms.iter().find(|r| r.location == l)
    }
}
