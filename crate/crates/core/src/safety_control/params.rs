use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_4;

/// Gains and limits of the nominal laws and the CBF-QP filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ControllerParams {
    pub k_v: f64,
    pub k_theta: f64,
    /// Negative braking gain of the stop law.
    pub k_slow: f64,
    /// Heading error above which the leader rotates in place (rad).
    pub theta_bar: f64,
    pub v_max: f64,
    pub a_max: f64,
    pub omega_max: f64,
    /// Look-ahead distance along the planned path (m).
    pub delta: f64,
    /// Distance at which a waypoint counts as reached and the robot stops (m).
    pub d_arrive: f64,
    pub r_robot: f64,
    /// Minimum allowed robot center separation (m).
    pub r_safe: f64,
    /// Pedestrian radius used by robot-human constraints (m).
    pub r_human: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub slack_penalty: f64,
}

impl Default for ControllerParams {
    fn default() -> Self {
        Self {
            k_v: 1.0,
            k_theta: 2.0,
            k_slow: -2.0,
            theta_bar: FRAC_PI_4,
            v_max: 1.0,
            a_max: 2.0,
            omega_max: 2.0,
            delta: 0.5,
            d_arrive: 0.3,
            r_robot: 0.3,
            r_safe: 0.8,
            r_human: 0.35,
            alpha1: 1.5,
            alpha2: 1.5,
            slack_penalty: 1e4,
        }
    }
}

impl ControllerParams {
    /// Clearance kept between a robot center and an obstacle point: half the pairwise separation.
    pub fn obstacle_clearance(&self) -> f64 {
        self.r_safe / 2.0
    }

    pub fn human_clearance(&self) -> f64 {
        self.r_safe / 2.0 + self.r_human
    }

    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("k_v", self.k_v),
            ("k_theta", self.k_theta),
            ("v_max", self.v_max),
            ("a_max", self.a_max),
            ("omega_max", self.omega_max),
            ("r_robot", self.r_robot),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("slack_penalty", self.slack_penalty),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(format!("{name} must be positive, got {value}"));
            }
        }
        for (name, value) in [("delta", self.delta), ("d_arrive", self.d_arrive), ("r_human", self.r_human)] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(format!("{name} must be non-negative, got {value}"));
            }
        }
        if !(self.k_slow < 0.0) {
            return Err(format!("k_slow must be negative, got {}", self.k_slow));
        }
        if !(self.theta_bar > 0.0 && self.theta_bar < std::f64::consts::PI) {
            return Err(format!("theta_bar must lie in (0, pi), got {}", self.theta_bar));
        }
        if !(self.r_safe >= 2.0 * self.r_robot) {
            return Err(format!("r_safe {} is below twice r_robot {}", self.r_safe, self.r_robot));
        }
        Ok(())
    }
}

/// Per-robot overrides of the nominal-law gains; safety radii and actuator
/// limits stay shared so a cluster QP sees one consistent set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerOverrides {
    pub k_v: Option<f64>,
    pub k_theta: Option<f64>,
    pub k_slow: Option<f64>,
    pub theta_bar: Option<f64>,
    pub v_max: Option<f64>,
    pub delta: Option<f64>,
    pub d_arrive: Option<f64>,
}

impl ControllerOverrides {
    pub fn apply(&self, base: &ControllerParams) -> ControllerParams {
        let mut p = *base;
        p.k_v = self.k_v.unwrap_or(p.k_v);
        p.k_theta = self.k_theta.unwrap_or(p.k_theta);
        p.k_slow = self.k_slow.unwrap_or(p.k_slow);
        p.theta_bar = self.theta_bar.unwrap_or(p.theta_bar);
        p.v_max = self.v_max.unwrap_or(p.v_max);
        p.delta = self.delta.unwrap_or(p.delta);
        p.d_arrive = self.d_arrive.unwrap_or(p.d_arrive);
        p
    }
}
