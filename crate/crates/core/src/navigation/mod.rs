//! Waypoint generation over authored roadways, the room-queue protocol and
//! arrival-time bookkeeping.

mod plan;
mod queue;
mod roadway;

pub use plan::{expand_actions, on_queue_position, record_arrival, Waypoint, WaypointKind, WaypointPlan};
pub use queue::{QueueFull, ReleaseOutcome, RoomQueue};
pub use roadway::{RoadwayNetwork, ROUTE_ENDPOINT_TOLERANCE};

use thiserror::Error;

use crate::ids::LocationId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NavigationError {
    #[error("unknown location {0}")]
    UnknownLocation(LocationId),
    #[error("route {from}->{to}: {message}")]
    BadRoute { from: LocationId, to: LocationId, message: String },
    #[error("room {0} has no queue slots")]
    NoSlots(LocationId),
}
