//! Static environment: occupancy grid, inflated costmap and the ray-cast obstacle sensor.

mod costmap;
mod grid;
mod raycast;

pub use costmap::{inflate, inflation_cost, Costmap, InflationParams, COST_FREE, COST_LETHAL, COST_MAX_INFLATED};
pub use grid::{load_map, GridGeometry, OccupancyGrid};
pub use raycast::{raycast, raycast_masked, ObstaclePointSet, Pose2, RayHit};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorldError {
    #[error("map parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid grid geometry: {0}")]
    InvalidGeometry(String),
    #[error("position ({x}, {y}) is outside the map")]
    OutOfBounds { x: f64, y: f64 },
}

impl WorldError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Self::Parse { line, message: message.into() }
    }
}
