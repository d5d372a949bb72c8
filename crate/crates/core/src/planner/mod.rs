//! Shared planning service: cost-aware 8-connected A* over the costmap and the
//! look-ahead query the controller tracks.
//!
//! Edge weights are `move_length * (1 + cost_weight * mean_cell_cost / 254)` with
//! `move_length` in cells (1 or sqrt 2). Weights are accumulated as fixed-point
//! integers so that any two optimal searches over the same graph report the
//! same total, independent of expansion order.

use glam::DVec2;
use serde::{Deserialize, Serialize};
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use thiserror::Error;

use crate::world::{Costmap, COST_LETHAL};

/// Fixed-point scale of path costs (units per cell-length).
pub const COST_UNIT_SCALE: f64 = (1u64 << 40) as f64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerParams {
    pub cost_weight: f64,
}

impl Default for PlannerParams {
    fn default() -> Self {
        Self { cost_weight: 3.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("start ({0}, {1}) is outside the map")]
    StartOutOfBounds(f64, f64),
    #[error("goal ({0}, {1}) is outside the map")]
    GoalOutOfBounds(f64, f64),
    #[error("start cell is lethal")]
    StartLethal,
    #[error("goal cell is lethal")]
    GoalLethal,
    #[error("goal is unreachable from start")]
    Unreachable,
    #[error("path is empty")]
    EmptyPath,
}

impl PlanError {
    /// True for errors caused by bad endpoints rather than map connectivity.
    pub fn is_invalid_input(&self) -> bool {
        !matches!(self, PlanError::Unreachable)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Path {
    pub points: Vec<DVec2>,
    pub total_cost: f64,
}

impl Path {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }
}

/// Edge weight between adjacent cells, in fixed-point units.
pub fn edge_cost_units(from_cost: u8, to_cost: u8, diagonal: bool, cost_weight: f64) -> u64 {
    let move_length = if diagonal { std::f64::consts::SQRT_2 } else { 1.0 };
    let mean = (from_cost as f64 + to_cost as f64) / 2.0;
    let w = move_length * (1.0 + cost_weight * mean / 254.0);
    (w * COST_UNIT_SCALE).round() as u64
}

pub fn units_to_cost(units: u64) -> f64 {
    units as f64 / COST_UNIT_SCALE
}

/// Euclidean heuristic shrunk slightly so it stays below the rounded edge sums.
fn heuristic_units(dx: f64, dy: f64) -> u64 {
    ((dx * dx + dy * dy).sqrt() * COST_UNIT_SCALE * (1.0 - 1e-6)).floor() as u64
}

pub const NEIGHBORS: [(i64, i64); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

/// Iterates the legal moves out of `cell`: 8-connected, no lethal targets and no
/// diagonal that cuts a lethal corner.
pub fn successors<'a>(
    costmap: &'a Costmap,
    blocked: &'a impl Fn(usize) -> bool,
    cell: usize,
) -> impl Iterator<Item = (usize, bool)> + 'a {
    let geo = costmap.geometry;
    let (x, y) = geo.coords(cell);
    let (w, h) = (geo.width as i64, geo.height as i64);
    let free = move |ix: i64, iy: i64| {
        if ix < 0 || iy < 0 || ix >= w || iy >= h {
            return false;
        }
        let i = geo.index(ix as usize, iy as usize);
        costmap.cost_at_index(i) != COST_LETHAL && !blocked(i)
    };
    NEIGHBORS.iter().filter_map(move |&(dx, dy)| {
        let (nx, ny) = (x as i64 + dx, y as i64 + dy);
        if !free(nx, ny) {
            return None;
        }
        let diagonal = dx != 0 && dy != 0;
        if diagonal && !(free(x as i64 + dx, y as i64) && free(x as i64, y as i64 + dy)) {
            return None;
        }
        Some((geo.index(nx as usize, ny as usize), diagonal))
    })
}

/// Cost-aware A* from `start` to `goal`.
pub fn plan(costmap: &Costmap, start: DVec2, goal: DVec2, params: &PlannerParams) -> Result<Path, PlanError> {
    plan_masked(costmap, None, start, goal, params)
}

/// A* with extra cells (flagged `true` in `blocked`) treated as lethal.
/// The start cell is never considered blocked by the mask.
pub fn plan_masked(
    costmap: &Costmap,
    blocked: Option<&[bool]>,
    start: DVec2,
    goal: DVec2,
    params: &PlannerParams,
) -> Result<Path, PlanError> {
    let geo = costmap.geometry;
    let (sx, sy) = geo
        .world_to_cell(start)
        .ok_or(PlanError::StartOutOfBounds(start.x, start.y))?;
    let (gx, gy) = geo
        .world_to_cell(goal)
        .ok_or(PlanError::GoalOutOfBounds(goal.x, goal.y))?;
    let start_i = geo.index(sx, sy);
    let goal_i = geo.index(gx, gy);
    if costmap.cost_at_index(start_i) == COST_LETHAL {
        return Err(PlanError::StartLethal);
    }
    let is_blocked = |i: usize| i != start_i && blocked.is_some_and(|m| m[i]);
    if costmap.cost_at_index(goal_i) == COST_LETHAL || is_blocked(goal_i) {
        return Err(PlanError::GoalLethal);
    }

    let h = |i: usize| {
        let (x, y) = geo.coords(i);
        heuristic_units(x as f64 - gx as f64, y as f64 - gy as f64)
    };
    let mut g = vec![u64::MAX; geo.len()];
    let mut parent = vec![usize::MAX; geo.len()];
    let mut closed = vec![false; geo.len()];
    let mut open = BinaryHeap::new();
    g[start_i] = 0;
    open.push(Reverse((h(start_i), Reverse(0u64), start_i)));

    while let Some(Reverse((_, Reverse(g_cur), cur))) = open.pop() {
        if closed[cur] || g_cur != g[cur] {
            continue;
        }
        if cur == goal_i {
            return Ok(reconstruct(costmap, &parent, start_i, goal_i, g_cur));
        }
        closed[cur] = true;
        for (next, diagonal) in successors(costmap, &is_blocked, cur) {
            if closed[next] {
                continue;
            }
            let w = edge_cost_units(
                costmap.cost_at_index(cur),
                costmap.cost_at_index(next),
                diagonal,
                params.cost_weight,
            );
            let cand = g_cur + w;
            if cand < g[next] {
                g[next] = cand;
                parent[next] = cur;
                open.push(Reverse((cand + h(next), Reverse(cand), next)));
            }
        }
    }
    Err(PlanError::Unreachable)
}

fn reconstruct(costmap: &Costmap, parent: &[usize], start: usize, goal: usize, units: u64) -> Path {
    let geo = costmap.geometry;
    let mut cells = vec![goal];
    let mut cur = goal;
    while cur != start {
        cur = parent[cur];
        cells.push(cur);
    }
    cells.reverse();
    let points = cells
        .into_iter()
        .map(|i| {
            let (x, y) = geo.coords(i);
            geo.cell_center(x, y)
        })
        .collect();
    Path { points, total_cost: units_to_cost(units) }
}

/// Index of the path point nearest to `position` (first one on ties).
pub fn nearest_index(path: &Path, position: DVec2) -> Result<usize, PlanError> {
    path.points
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.distance_squared(position).total_cmp(&b.distance_squared(position)))
        .map(|(i, _)| i)
        .ok_or(PlanError::EmptyPath)
}

/// Index form of [`lookahead_point`].
pub fn lookahead_index(path: &Path, position: DVec2, delta: f64) -> Result<usize, PlanError> {
    let start = nearest_index(path, position)?;
    Ok((start..path.points.len())
        .find(|&i| path.points[i].distance(position) >= delta)
        .unwrap_or(path.points.len() - 1))
}

/// First path point at or after the nearest one that is at least `delta` away;
/// falls back to the final point.
pub fn lookahead_point(path: &Path, position: DVec2, delta: f64) -> Result<DVec2, PlanError> {
    lookahead_index(path, position, delta).map(|i| path.points[i])
}
