use glam::DVec2;
use serde::{Deserialize, Serialize};

use super::{DynamicsError, RobotState};
use crate::world::ObstaclePointSet;

/// Helbing-Molnar style pedestrian parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HumanParams {
    pub v_desired: f64,
    /// Relaxation time of the goal term (s).
    pub tau: f64,
    /// Repulsion strength (m/s^2).
    pub strength: f64,
    /// Repulsion range (m).
    pub range: f64,
    /// Per-interaction force cap (m/s^2).
    pub force_cap: f64,
    pub radius: f64,
    pub waypoint_tolerance: f64,
    /// Speed cap as a multiple of `v_desired`.
    pub max_speed_factor: f64,
}

impl Default for HumanParams {
    fn default() -> Self {
        Self {
            v_desired: 1.0,
            tau: 0.5,
            strength: 2.0,
            range: 0.35,
            force_cap: 10.0,
            radius: 0.35,
            waypoint_tolerance: 0.5,
            max_speed_factor: 1.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumanState {
    pub position: DVec2,
    pub velocity: DVec2,
    pub goal_waypoints: Vec<DVec2>,
    pub current_goal_index: usize,
}

impl HumanState {
    pub fn new(position: DVec2, goal_waypoints: Vec<DVec2>) -> Self {
        Self { position, velocity: DVec2::ZERO, goal_waypoints, current_goal_index: 0 }
    }

    pub fn current_goal(&self) -> Option<DVec2> {
        self.goal_waypoints.get(self.current_goal_index).copied()
    }
}

/// Exponential repulsion pushing `me` away from `other`, capped at `force_cap`.
/// Coincident points push along +x.
pub fn repulsion(me: DVec2, other: DVec2, radius_sum: f64, p: &HumanParams) -> DVec2 {
    let offset = me - other;
    let d = offset.length();
    let dir = if d > 1e-12 { offset / d } else { DVec2::X };
    let magnitude = (p.strength * ((radius_sum - d) / p.range).exp()).min(p.force_cap);
    dir * magnitude
}

/// Advances one pedestrian by `dt` (semi-implicit Euler).
pub fn step_human(
    h: &HumanState,
    robots: &[RobotState],
    robot_radius: f64,
    others: &[HumanState],
    obstacles: &ObstaclePointSet,
    dt: f64,
    p: &HumanParams,
) -> Result<HumanState, DynamicsError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(DynamicsError::InvalidTimeStep(dt));
    }
    let mut next = h.clone();
    if !next.goal_waypoints.is_empty() {
        let goal = next.goal_waypoints[next.current_goal_index];
        if next.position.distance(goal) <= p.waypoint_tolerance {
            next.current_goal_index = (next.current_goal_index + 1) % next.goal_waypoints.len();
        }
    }

    let mut force = DVec2::ZERO;
    if let Some(goal) = next.current_goal() {
        let to_goal = goal - next.position;
        let dist = to_goal.length();
        let desired = if dist > 1e-9 { to_goal / dist * p.v_desired } else { DVec2::ZERO };
        force += (desired - next.velocity) / p.tau;
    } else {
        force -= next.velocity / p.tau;
    }
    for r in robots {
        force += repulsion(next.position, r.position(), p.radius + robot_radius, p);
    }
    for o in others {
        force += repulsion(next.position, o.position, 2.0 * p.radius, p);
    }
    for pt in obstacles.points() {
        force += repulsion(next.position, pt, p.radius, p);
    }

    let mut velocity = next.velocity + force * dt;
    let cap = p.v_desired * p.max_speed_factor;
    if velocity.length() > cap {
        velocity = velocity.normalize() * cap;
    }
    next.velocity = velocity;
    next.position += velocity * dt;
    if !next.position.is_finite() {
        return Err(DynamicsError::NonFinite);
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn at_goal_is_fixed_point() {
        let h = HumanState::new(DVec2::new(1.0, 1.0), vec![DVec2::new(1.0, 1.0)]);
        let n = step_human(&h, &[], 0.3, &[], &ObstaclePointSet::default(), 0.1, &HumanParams::default()).unwrap();
        assert_eq!(n.current_goal_index, 0);
        assert!(n.position.distance(h.position) < 1e-12);
    }

    #[test]
    fn goal_relaxation_one_step() {
        let h = HumanState::new(DVec2::ZERO, vec![DVec2::new(10.0, 0.0)]);
        let p = HumanParams { tau: 0.5, v_desired: 1.0, ..HumanParams::default() };
        let n = step_human(&h, &[], 0.3, &[], &ObstaclePointSet::default(), 0.1, &p).unwrap();
        assert!((n.velocity.length() - 0.2).abs() < 1e-9);
        assert!(n.velocity.y.abs() < 1e-15);
    }

    #[test]
    fn overlapping_robot_pushes_plus_x() {
        let h = HumanState::new(DVec2::new(2.0, 2.0), vec![]);
        let robot = RobotState::new(2.0, 2.0, 0.0, 0.0);
        let p = HumanParams::default();
        let n = step_human(&h, &[robot], 0.3, &[], &ObstaclePointSet::default(), 0.1, &p).unwrap();
        assert!(n.velocity.x > 0.0 && n.velocity.y == 0.0);
        assert!((n.velocity.x - p.force_cap * 0.1).abs() < 1e-12);
    }

    #[test]
    fn waypoints_cycle() {
        let mut h = HumanState::new(DVec2::ZERO, vec![DVec2::ZERO, DVec2::new(0.2, 0.0)]);
        let p = HumanParams::default();
        h = step_human(&h, &[], 0.3, &[], &ObstaclePointSet::default(), 0.1, &p).unwrap();
        assert_eq!(h.current_goal_index, 1);
        h = step_human(&h, &[], 0.3, &[], &ObstaclePointSet::default(), 0.1, &p).unwrap();
        assert_eq!(h.current_goal_index, 0);
    }

    #[test]
    fn speed_is_capped() {
        let h = HumanState { velocity: DVec2::new(5.0, 0.0), ..HumanState::new(DVec2::ZERO, vec![]) };
        let p = HumanParams::default();
        let n = step_human(&h, &[], 0.3, &[], &ObstaclePointSet::default(), 0.01, &p).unwrap();
        assert!(n.velocity.length() <= 1.3 + 1e-12);
    }
}
