use glam::DVec2;

use super::ControllerParams;
use crate::dynamics::{Control, RobotState};
use crate::geom::wrap_angle;

/// Stop law for non-leaders: brake proportionally to the current speed.
pub fn nominal_stop(state: &RobotState, p: &ControllerParams) -> Control {
    Control::new((p.k_slow * state.v).clamp(-p.v_max, p.v_max), 0.0)
}

/// Leader law toward `waypoint`.
///
/// Rotates in place while the heading error exceeds `theta_bar`, otherwise tracks
/// `v* = min(k_v d cos(err), v_max)` (floored at zero) while turning. Within
/// `d_arrive` of the waypoint the stop law applies.
pub fn nominal_leader(state: &RobotState, waypoint: DVec2, p: &ControllerParams) -> Control {
    let offset = waypoint - state.position();
    let d = offset.length();
    if d < p.d_arrive {
        return nominal_stop(state, p);
    }
    let desired_heading = offset.y.atan2(offset.x);
    let err = wrap_angle(desired_heading - state.theta);
    let v_star = (p.k_v * d * err.cos()).min(p.v_max).max(0.0);
    if err.abs() > p.theta_bar {
        Control::new(0.0, p.k_theta * err)
    } else {
        Control::new(p.k_v * (v_star - state.v), p.k_theta * err)
    }
}
