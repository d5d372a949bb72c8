//! Second-order distance barrier constraints under dynamic unicycle motion.
//!
//! For two points with relative position `dp` and relative velocity `dv`,
//! `h = |dp|^2 - r^2`, `h' = 2 dp.dv` and `h'' = 2|dv|^2 + 2 dp.(acc_i - acc_j)`.
//! A robot's acceleration is `a e(theta) + v omega e_perp(theta)`, linear in
//! its control `(a, omega)`, so `h'' + (alpha1 + alpha2) h' + alpha1 alpha2 h >= 0`
//! is one linear inequality in the stacked controls.

use glam::DVec2;

use super::ControllerParams;
use crate::dynamics::{Control, HumanState, RobotState};
use crate::geom::heading;
use crate::ids::RobotId;
use crate::world::ObstaclePointSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    RobotRobot(RobotId, RobotId),
    Obstacle { robot: RobotId, ray: usize },
    Human { robot: RobotId, human: usize },
}

/// `coeffs . u >= rhs` over the stacked `(a, omega)` controls of a cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct CbfConstraint {
    pub kind: ConstraintKind,
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

impl CbfConstraint {
    pub fn residual(&self, u: &[f64]) -> f64 {
        self.coeffs.iter().zip(u).map(|(c, x)| c * x).sum::<f64>() - self.rhs
    }
}

/// Barrier value and its first two time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierValue {
    pub h: f64,
    pub h_dot: f64,
    pub h_ddot: f64,
}

/// Partial derivatives of `dp . acc` with respect to `(a, omega)` of one robot.
fn accel_coeffs(dp: DVec2, s: &RobotState) -> [f64; 2] {
    let e = heading(s.theta);
    let e_perp = DVec2::new(-e.y, e.x);
    [dp.dot(e), s.v * dp.dot(e_perp)]
}

fn drift(dp: DVec2, dv: DVec2, radius: f64) -> (f64, f64, f64) {
    let h = dp.length_squared() - radius * radius;
    let h_dot = 2.0 * dp.dot(dv);
    let free = 2.0 * dv.length_squared();
    (h, h_dot, free)
}

fn rhs(h: f64, h_dot: f64, free: f64, p: &ControllerParams) -> f64 {
    -(free + (p.alpha1 + p.alpha2) * h_dot + p.alpha1 * p.alpha2 * h)
}

/// Robot-robot barrier and derivatives for given controls (used for gradient checks).
pub fn pair_barrier(si: &RobotState, ui: Control, sj: &RobotState, uj: Control, radius: f64) -> BarrierValue {
    let dp = si.position() - sj.position();
    let dv = si.velocity() - sj.velocity();
    let ci = accel_coeffs(dp, si);
    let cj = accel_coeffs(dp, sj);
    BarrierValue {
        h: dp.length_squared() - radius * radius,
        h_dot: 2.0 * dp.dot(dv),
        h_ddot: 2.0 * dv.length_squared() + 2.0 * (ci[0] * ui.a + ci[1] * ui.omega)
            - 2.0 * (cj[0] * uj.a + cj[1] * uj.omega),
    }
}

/// Barrier between a robot and a point moving with constant velocity.
pub fn point_barrier(s: &RobotState, u: Control, point: DVec2, point_velocity: DVec2, radius: f64) -> BarrierValue {
    let dp = s.position() - point;
    let dv = s.velocity() - point_velocity;
    let c = accel_coeffs(dp, s);
    BarrierValue {
        h: dp.length_squared() - radius * radius,
        h_dot: 2.0 * dp.dot(dv),
        h_ddot: 2.0 * dv.length_squared() + 2.0 * (c[0] * u.a + c[1] * u.omega),
    }
}

/// Builds every barrier constraint of a cluster. `states[k]` belongs to `members[k]`
/// and owns variables `2k` (acceleration) and `2k + 1` (turn rate).
pub fn build_constraints(
    members: &[RobotId],
    states: &[RobotState],
    obstacles: &[&ObstaclePointSet],
    humans: &[HumanState],
    p: &ControllerParams,
) -> Vec<CbfConstraint> {
    let n = members.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let (si, sj) = (&states[i], &states[j]);
            let dp = si.position() - sj.position();
            let dv = si.velocity() - sj.velocity();
            let (h, h_dot, free) = drift(dp, dv, p.r_safe);
            let mut coeffs = vec![0.0; 2 * n];
            let ci = accel_coeffs(dp, si);
            let cj = accel_coeffs(dp, sj);
            coeffs[2 * i] = 2.0 * ci[0];
            coeffs[2 * i + 1] = 2.0 * ci[1];
            coeffs[2 * j] = -2.0 * cj[0];
            coeffs[2 * j + 1] = -2.0 * cj[1];
            out.push(CbfConstraint {
                kind: ConstraintKind::RobotRobot(members[i], members[j]),
                coeffs,
                rhs: rhs(h, h_dot, free, p),
            });
        }
    }
    for i in 0..n {
        let s = &states[i];
        let mut point_row = |kind, point: DVec2, velocity: DVec2, radius: f64| {
            let dp = s.position() - point;
            let dv = s.velocity() - velocity;
            let (h, h_dot, free) = drift(dp, dv, radius);
            let c = accel_coeffs(dp, s);
            let mut coeffs = vec![0.0; 2 * n];
            coeffs[2 * i] = 2.0 * c[0];
            coeffs[2 * i + 1] = 2.0 * c[1];
            out.push(CbfConstraint { kind, coeffs, rhs: rhs(h, h_dot, free, p) });
        };
        if let Some(obs) = obstacles.get(i) {
            for hit in &obs.hits {
                point_row(
                    ConstraintKind::Obstacle { robot: members[i], ray: hit.ray },
                    hit.point,
                    DVec2::ZERO,
                    p.obstacle_clearance(),
                );
            }
        }
        for (k, hmn) in humans.iter().enumerate() {
            point_row(
                ConstraintKind::Human { robot: members[i], human: k },
                hmn.position,
                hmn.velocity,
                p.human_clearance(),
            );
        }
    }
    out
}
