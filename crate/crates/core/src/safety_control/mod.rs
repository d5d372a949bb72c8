//! Per-tick control synthesis: nominal leader/stop laws and the CBF-QP safety
//! filter in single-robot and cluster form.
//!
//! The filter first solves the hard-constrained QP
//! `min sum |u_i - u_i*|^2` subject to every barrier row and the actuator box.
//! Only when that is infeasible does it fall back to the slack form, where each
//! barrier row may be relaxed by `s_c >= 0` at cost `slack_penalty * s_c^2`;
//! actuator bounds are never relaxed. A solver breakdown yields stop controls.

mod cbf;
mod nominal;
mod params;
pub mod qp;

pub use cbf::{build_constraints, pair_barrier, point_barrier, BarrierValue, CbfConstraint, ConstraintKind};
pub use nominal::{nominal_leader, nominal_stop};
pub use params::{ControllerOverrides, ControllerParams};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

use crate::dynamics::{Control, HumanState, RobotState};
use crate::ids::RobotId;
use crate::world::ObstaclePointSet;
use qp::{solve_penalized_box, solve_qp, QpError, QpOptions, SoftRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QpStatus {
    Feasible,
    FeasibleWithSlack,
    InfeasibleFallback,
}

impl QpStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            QpStatus::Feasible => "feasible",
            QpStatus::FeasibleWithSlack => "feasible-with-slack",
            QpStatus::InfeasibleFallback => "infeasible-fallback",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ControlError {
    #[error("cluster has no members")]
    EmptyCluster,
    #[error("{0} has no state")]
    MissingState(RobotId),
    #[error("{0} has no nominal control")]
    MissingNominal(RobotId),
    #[error("non-finite state or nominal control for {0}")]
    NonFinite(RobotId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlDecision {
    pub controls: BTreeMap<RobotId, Control>,
    /// Slack per barrier row, in the order of `constraints`.
    pub slack_used: Vec<f64>,
    pub qp_status: QpStatus,
    pub constraints: Vec<CbfConstraint>,
    /// `row . u + slack - rhs` per barrier row; non-negative up to solver tolerance.
    pub residuals: Vec<f64>,
    /// Objective value `sum |u - u*|^2 + slack_penalty * sum s^2`.
    pub objective: f64,
    pub iterations: usize,
}

impl ControlDecision {
    pub fn max_slack(&self) -> f64 {
        self.slack_used.iter().copied().fold(0.0, f64::max)
    }
}

fn bounds(n: usize, p: &ControllerParams) -> (DVector<f64>, DVector<f64>) {
    let hi = DVector::from_fn(2 * n, |i, _| if i % 2 == 0 { p.a_max } else { p.omega_max });
    (-hi.clone(), hi)
}

/// Solves the joint CBF-QP of a cluster. `members` fixes the variable order.
pub fn solve_cluster_qp(
    members: &[RobotId],
    states: &BTreeMap<RobotId, RobotState>,
    nominals: &BTreeMap<RobotId, Control>,
    obstacle_points: &BTreeMap<RobotId, ObstaclePointSet>,
    humans: &[HumanState],
    p: &ControllerParams,
) -> Result<ControlDecision, ControlError> {
    if members.is_empty() {
        return Err(ControlError::EmptyCluster);
    }
    let mut st = Vec::with_capacity(members.len());
    let mut nom = Vec::with_capacity(2 * members.len());
    for id in members {
        let s = *states.get(id).ok_or(ControlError::MissingState(*id))?;
        let u = *nominals.get(id).ok_or(ControlError::MissingNominal(*id))?;
        if !s.is_finite() || !u.a.is_finite() || !u.omega.is_finite() {
            return Err(ControlError::NonFinite(*id));
        }
        st.push(s);
        nom.extend([u.a, u.omega]);
    }
    let empty = ObstaclePointSet::default();
    let obstacles: Vec<&ObstaclePointSet> =
        members.iter().map(|id| obstacle_points.get(id).unwrap_or(&empty)).collect();
    let constraints = build_constraints(members, &st, &obstacles, humans, p);
    Ok(filter(members, &st, &nom, constraints, p))
}

/// Single-robot CBF-QP: obstacle and human constraints only.
pub fn solve_single_qp(
    id: RobotId,
    state: &RobotState,
    nominal: Control,
    obstacle_points: &ObstaclePointSet,
    humans: &[HumanState],
    p: &ControllerParams,
) -> Result<ControlDecision, ControlError> {
    let states = BTreeMap::from([(id, *state)]);
    let nominals = BTreeMap::from([(id, nominal)]);
    let obstacles = BTreeMap::from([(id, obstacle_points.clone())]);
    solve_cluster_qp(&[id], &states, &nominals, &obstacles, humans, p)
}

fn filter(
    members: &[RobotId],
    states: &[RobotState],
    nominal: &[f64],
    constraints: Vec<CbfConstraint>,
    p: &ControllerParams,
) -> ControlDecision {
    let n = members.len();
    let dim = 2 * n;
    let (lo, hi) = bounds(n, p);
    let u_nom = DVector::from_row_slice(nominal);
    let opts = QpOptions::default();

    // Rows: barrier constraints, then the actuator box.
    let m = constraints.len();
    let mut g = DMatrix::zeros(m + 2 * dim, dim);
    let mut b = DVector::zeros(m + 2 * dim);
    for (r, c) in constraints.iter().enumerate() {
        for (k, &v) in c.coeffs.iter().enumerate() {
            g[(r, k)] = v;
        }
        b[r] = c.rhs;
    }
    for k in 0..dim {
        g[(m + 2 * k, k)] = 1.0;
        b[m + 2 * k] = lo[k];
        g[(m + 2 * k + 1, k)] = -1.0;
        b[m + 2 * k + 1] = -hi[k];
    }
    // A nominal that already satisfies every row is the optimum; return it bit-exact.
    let in_box = (0..dim).all(|k| lo[k] <= nominal[k] && nominal[k] <= hi[k]);
    if in_box && constraints.iter().all(|c| c.residual(nominal) >= 0.0) {
        let residuals = constraints.iter().map(|c| c.residual(nominal)).collect();
        let controls = members
            .iter()
            .enumerate()
            .map(|(k, id)| (*id, Control::new(nominal[2 * k], nominal[2 * k + 1])))
            .collect();
        return ControlDecision {
            controls,
            slack_used: vec![0.0; m],
            qp_status: QpStatus::Feasible,
            constraints,
            residuals,
            objective: 0.0,
            iterations: 0,
        };
    }
    let h = DMatrix::identity(dim, dim) * 2.0;
    let c = &u_nom * -2.0;

    let (u, slack, status, iterations) = match solve_qp(&h, &c, &g, &b, &opts) {
        Ok(sol) => {
            let u = sol.x;
            (u, vec![0.0; m], QpStatus::Feasible, sol.iterations)
        }
        Err(QpError::Infeasible) => {
            let rows: Vec<SoftRow> = constraints
                .iter()
                .map(|c| SoftRow { a: DVector::from_row_slice(&c.coeffs), b: c.rhs })
                .collect();
            match solve_penalized_box(&u_nom, &rows, &lo, &hi, p.slack_penalty, &opts) {
                Ok((u, it)) => {
                    let slack = rows.iter().map(|r| (r.b - r.a.dot(&u)).max(0.0)).collect();
                    (u, slack, QpStatus::FeasibleWithSlack, it)
                }
                Err(_) => return fallback(members, states, constraints, nominal, p),
            }
        }
        Err(_) => return fallback(members, states, constraints, nominal, p),
    };

    // Clip round-off at the box edges.
    let u = u.zip_zip_map(&lo, &hi, |x, l, h| x.clamp(l, h));
    let values: Vec<f64> = u.iter().copied().collect();
    let residuals = constraints.iter().zip(&slack).map(|(c, s)| c.residual(&values) + s).collect();
    let objective = (&u - &u_nom).norm_squared() + p.slack_penalty * slack.iter().map(|s| s * s).sum::<f64>();
    let controls = members
        .iter()
        .enumerate()
        .map(|(k, id)| (*id, Control::new(values[2 * k], values[2 * k + 1])))
        .collect();
    ControlDecision { controls, slack_used: slack, qp_status: status, constraints, residuals, objective, iterations }
}

fn fallback(
    members: &[RobotId],
    states: &[RobotState],
    constraints: Vec<CbfConstraint>,
    nominal: &[f64],
    p: &ControllerParams,
) -> ControlDecision {
    let mut values = Vec::with_capacity(2 * members.len());
    let controls = members
        .iter()
        .zip(states)
        .map(|(id, s)| {
            let u = nominal_stop(s, p);
            let u = Control::new(u.a.clamp(-p.a_max, p.a_max), 0.0);
            values.extend([u.a, u.omega]);
            (*id, u)
        })
        .collect();
    let residuals: Vec<f64> = constraints.iter().map(|c| c.residual(&values)).collect();
    let slack = residuals.iter().map(|r| (-r).max(0.0)).collect();
    let objective = values.iter().zip(nominal).map(|(a, b)| (a - b).powi(2)).sum();
    ControlDecision {
        controls,
        slack_used: slack,
        qp_status: QpStatus::InfeasibleFallback,
        constraints,
        residuals,
        objective,
        iterations: 0,
    }
}
