use glam::DVec2;
use serde::{Deserialize, Serialize};

use super::DynamicsError;
use crate::geom::{heading, wrap_angle};

/// Dynamic unicycle state: planar pose plus signed forward speed.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RobotState {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub v: f64,
}

impl RobotState {
    pub fn new(x: f64, y: f64, theta: f64, v: f64) -> Self {
        Self { x, y, theta, v }
    }

    pub fn position(&self) -> DVec2 {
        DVec2::new(self.x, self.y)
    }

    /// World-frame velocity `v * (cos theta, sin theta)`.
    pub fn velocity(&self) -> DVec2 {
        heading(self.theta) * self.v
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.theta.is_finite() && self.v.is_finite()
    }
}

/// Forward acceleration and turn rate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Control {
    pub a: f64,
    pub omega: f64,
}

impl Control {
    pub const ZERO: Control = Control { a: 0.0, omega: 0.0 };

    pub fn new(a: f64, omega: f64) -> Self {
        Self { a, omega }
    }
}

fn derivative(s: [f64; 4], u: Control) -> [f64; 4] {
    let [_, _, theta, v] = s;
    [v * theta.cos(), v * theta.sin(), u.omega, u.a]
}

fn axpy(s: [f64; 4], k: [f64; 4], h: f64) -> [f64; 4] {
    [s[0] + h * k[0], s[1] + h * k[1], s[2] + h * k[2], s[3] + h * k[3]]
}

/// Longest single RK4 stage; longer `dt` values are split evenly.
pub const MAX_RK4_STEP: f64 = 0.01;

/// Integrates the dynamic unicycle over `dt` under a held control (RK4).
///
/// The speed is clamped to `[-v_max, v_max]` and the heading wrapped to `(-pi, pi]`
/// after every internal step.
pub fn step_robot(
    state: RobotState,
    control: Control,
    dt: f64,
    v_max: f64,
) -> Result<RobotState, DynamicsError> {
    if !state.is_finite() || !control.a.is_finite() || !control.omega.is_finite() {
        return Err(DynamicsError::NonFinite);
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(DynamicsError::InvalidTimeStep(dt));
    }
    let n = (dt / MAX_RK4_STEP).ceil().max(1.0) as usize;
    let h = dt / n as f64;
    let mut s = state;
    for _ in 0..n {
        s = rk4(s, control, h, v_max);
    }
    Ok(s)
}

fn rk4(state: RobotState, control: Control, dt: f64, v_max: f64) -> RobotState {
    let s = [state.x, state.y, state.theta, state.v];
    let k1 = derivative(s, control);
    let k2 = derivative(axpy(s, k1, dt / 2.0), control);
    let k3 = derivative(axpy(s, k2, dt / 2.0), control);
    let k4 = derivative(axpy(s, k3, dt), control);
    let mut next = [0.0; 4];
    for i in 0..4 {
        next[i] = s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    RobotState {
        x: next[0],
        y: next[1],
        theta: wrap_angle(next[2]),
        v: next[3].clamp(-v_max, v_max),
    }
}
