use glam::DVec2;
use std::collections::BTreeMap;

use super::NavigationError;
use crate::ids::LocationId;

/// Authored route endpoints must lie this close to their locations (m).
pub const ROUTE_ENDPOINT_TOLERANCE: f64 = 0.5;

/// System locations plus directional routes between them. Pairs without an
/// authored route use the straight segment `[from, to]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RoadwayNetwork {
    locations: Vec<DVec2>,
    routes: BTreeMap<(LocationId, LocationId), Vec<DVec2>>,
    queue_slots: BTreeMap<LocationId, Vec<DVec2>>,
}

impl RoadwayNetwork {
    pub fn new(locations: Vec<DVec2>) -> Self {
        Self { locations, routes: BTreeMap::new(), queue_slots: BTreeMap::new() }
    }

    pub fn add_route(&mut self, from: LocationId, to: LocationId, waypoints: Vec<DVec2>) -> Result<(), NavigationError> {
        let a = self.location(from)?;
        let b = self.location(to)?;
        let bad = |message: &str| NavigationError::BadRoute { from, to, message: message.to_string() };
        if from == to {
            return Err(bad("route endpoints must differ"));
        }
        let (Some(first), Some(last)) = (waypoints.first(), waypoints.last()) else {
            return Err(bad("route is empty"));
        };
        if first.distance(a) > ROUTE_ENDPOINT_TOLERANCE {
            return Err(bad("first waypoint is too far from the start location"));
        }
        if last.distance(b) > ROUTE_ENDPOINT_TOLERANCE {
            return Err(bad("last waypoint is too far from the end location"));
        }
        self.routes.insert((from, to), waypoints);
        Ok(())
    }

    /// Registers a room's queue slots, front slot first.
    pub fn add_queue(&mut self, room: LocationId, slots: Vec<DVec2>) -> Result<(), NavigationError> {
        self.location(room)?;
        if slots.is_empty() {
            return Err(NavigationError::NoSlots(room));
        }
        self.queue_slots.insert(room, slots);
        Ok(())
    }

    pub fn location(&self, id: LocationId) -> Result<DVec2, NavigationError> {
        self.locations.get(id).copied().ok_or(NavigationError::UnknownLocation(id))
    }

    pub fn locations(&self) -> &[DVec2] {
        &self.locations
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn route(&self, from: LocationId, to: LocationId) -> Result<Vec<DVec2>, NavigationError> {
        let a = self.location(from)?;
        let b = self.location(to)?;
        Ok(self.routes.get(&(from, to)).cloned().unwrap_or_else(|| vec![a, b]))
    }

    pub fn queue_slots(&self, room: LocationId) -> Option<&[DVec2]> {
        self.queue_slots.get(&room).map(Vec::as_slice)
    }

    pub fn nearest_location(&self, p: DVec2) -> Option<LocationId> {
        self.locations
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.distance(p).total_cmp(&b.distance(p)))
            .map(|(i, _)| i)
    }
}
