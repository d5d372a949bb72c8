//! Robot and pedestrian motion models.

mod social_force;
mod unicycle;

pub use social_force::{repulsion, step_human, HumanParams, HumanState};
pub use unicycle::{step_robot, Control, RobotState, MAX_RK4_STEP};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("non-finite state or control")]
    NonFinite,
    #[error("time step must be positive and finite, got {0}")]
    InvalidTimeStep(f64),
}
