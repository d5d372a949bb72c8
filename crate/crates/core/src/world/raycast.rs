use glam::DVec2;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use super::{OccupancyGrid, WorldError};

/// Position plus heading of a sensing agent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose2 {
    pub position: DVec2,
    pub heading: f64,
}

impl Pose2 {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self { position: DVec2::new(x, y), heading }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayHit {
    pub ray: usize,
    pub point: DVec2,
}

/// First obstacle hit per sensing ray. Rays without a hit are simply absent.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ObstaclePointSet {
    pub hits: Vec<RayHit>,
}

impl ObstaclePointSet {
    pub fn len(&self) -> usize {
        self.hits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hits.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = DVec2> + '_ {
        self.hits.iter().map(|h| h.point)
    }

    pub fn from_points(points: impl IntoIterator<Item = DVec2>) -> Self {
        Self {
            hits: points.into_iter().enumerate().map(|(ray, point)| RayHit { ray, point }).collect(),
        }
    }
}

/// Casts `n_rays` evenly spaced rays rotating with the pose heading.
pub fn raycast(
    grid: &OccupancyGrid,
    pose: Pose2,
    n_rays: usize,
    max_range: f64,
) -> Result<ObstaclePointSet, WorldError> {
    raycast_masked(grid, None, pose, n_rays, max_range)
}

/// Like [`raycast`], additionally treating cells flagged in `extra_blocked` as occupied.
pub fn raycast_masked(
    grid: &OccupancyGrid,
    extra_blocked: Option<&[bool]>,
    pose: Pose2,
    n_rays: usize,
    max_range: f64,
) -> Result<ObstaclePointSet, WorldError> {
    if !pose.position.is_finite() || !grid.geometry.contains(pose.position) {
        return Err(WorldError::OutOfBounds { x: pose.position.x, y: pose.position.y });
    }
    if n_rays == 0 {
        return Err(WorldError::InvalidGeometry("n_rays must be at least 1".into()));
    }
    let blocked = |ix: usize, iy: usize| {
        grid.is_occupied(ix, iy)
            || extra_blocked.is_some_and(|m| m[grid.geometry.index(ix, iy)])
    };
    let hits = (0..n_rays)
        .filter_map(|k| {
            let angle = pose.heading + TAU * k as f64 / n_rays as f64;
            let dir = DVec2::new(angle.cos(), angle.sin());
            cast_one(grid, &blocked, pose.position, dir, max_range).map(|point| RayHit { ray: k, point })
        })
        .collect();
    Ok(ObstaclePointSet { hits })
}

/// Grid traversal visiting every cell the ray crosses; returns the entry point
/// of the first blocked cell within range.
fn cast_one(
    grid: &OccupancyGrid,
    blocked: &impl Fn(usize, usize) -> bool,
    start: DVec2,
    dir: DVec2,
    max_range: f64,
) -> Option<DVec2> {
    let geo = &grid.geometry;
    let res = geo.resolution;
    let (mut ix, mut iy) = geo.world_to_cell(start)?;
    if blocked(ix, iy) {
        return Some(start);
    }
    let g = (start - geo.origin) / res;
    let max_t = max_range / res;

    let axis = |pos: f64, cell: usize, d: f64| -> (i64, f64, f64) {
        if d > 0.0 {
            (1, (cell as f64 + 1.0 - pos) / d, 1.0 / d)
        } else if d < 0.0 {
            (-1, (pos - cell as f64) / -d, -1.0 / d)
        } else {
            (0, f64::INFINITY, f64::INFINITY)
        }
    };
    let (step_x, mut t_max_x, t_delta_x) = axis(g.x, ix, dir.x);
    let (step_y, mut t_max_y, t_delta_y) = axis(g.y, iy, dir.y);

    loop {
        let stepped_x = t_max_x <= t_max_y;
        let t = if stepped_x {
            let t = t_max_x;
            let nx = ix as i64 + step_x;
            if nx < 0 || nx >= geo.width as i64 {
                return None;
            }
            ix = nx as usize;
            t_max_x += t_delta_x;
            t
        } else {
            let t = t_max_y;
            let ny = iy as i64 + step_y;
            if ny < 0 || ny >= geo.height as i64 {
                return None;
            }
            iy = ny as usize;
            t_max_y += t_delta_y;
            t
        };
        if t > max_t {
            return None;
        }
        if blocked(ix, iy) {
            let mut p = g + dir * t;
            // Snap the crossed coordinate onto the exact grid line.
            if stepped_x {
                p.x = if step_x > 0 { ix as f64 } else { ix as f64 + 1.0 };
            } else {
                p.y = if step_y > 0 { iy as f64 } else { iy as f64 + 1.0 };
            }
            return Some(geo.origin + p * res);
        }
    }
}
