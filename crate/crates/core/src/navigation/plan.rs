use glam::DVec2;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use super::{NavigationError, RoadwayNetwork, RoomQueue};
use crate::ids::{LocationId, RobotId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WaypointKind {
    /// Intermediate roadway point.
    Route,
    /// Arrival at a system location completes the matching visits.
    Visit { location: LocationId },
    /// Queue slot in front of `room`; retargeted as the queue drains.
    Slot { room: LocationId, index: usize },
    /// Free-standing target such as a room exit.
    Hold,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub position: DVec2,
    #[serde(flatten)]
    pub kind: WaypointKind,
}

impl Waypoint {
    pub fn route(position: DVec2) -> Self {
        Self { position, kind: WaypointKind::Route }
    }

    pub fn visit(position: DVec2, location: LocationId) -> Self {
        Self { position, kind: WaypointKind::Visit { location } }
    }

    pub fn is_route(&self) -> bool {
        matches!(self.kind, WaypointKind::Route)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WaypointPlan {
    pub robot_id: RobotId,
    pub pending: VecDeque<Waypoint>,
    /// `(waypoint, time)` with strictly increasing times.
    pub arrivals: Vec<(Waypoint, f64)>,
}

impl WaypointPlan {
    pub fn new(robot_id: RobotId) -> Self {
        Self { robot_id, pending: VecDeque::new(), arrivals: Vec::new() }
    }

    pub fn front(&self) -> Option<&Waypoint> {
        self.pending.front()
    }

    /// The waypoints handed to the planner.
    pub fn next_two(&self) -> impl Iterator<Item = &Waypoint> {
        self.pending.iter().take(2)
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }

    /// First queue-slot waypoint, if the plan still waits on a room.
    pub fn pending_slot(&self) -> Option<(LocationId, usize)> {
        self.pending.iter().find_map(|w| match w.kind {
            WaypointKind::Slot { room, index } => Some((room, index)),
            _ => None,
        })
    }
}

fn push_leg(out: &mut Vec<Waypoint>, route: &[DVec2], to: LocationId, net: &RoadwayNetwork, skip: usize) -> Result<(), NavigationError> {
    let target = net.location(to)?;
    let interior_end = route.len().saturating_sub(1);
    // route[0] is the location being left.
    for &p in route.iter().take(interior_end).skip(skip.max(1)) {
        if out.last().map_or(true, |w| w.position.distance(p) > 1e-9) {
            out.push(Waypoint::route(p));
        }
    }
    let last = route.last().copied().unwrap_or(target);
    if last.distance(target) > 1e-9 {
        out.push(Waypoint::route(last));
    }
    match net.queue_slots(to) {
        Some(slots) => {
            let index = slots.len() - 1;
            out.push(Waypoint { position: slots[index], kind: WaypointKind::Slot { room: to, index } });
        }
        None => out.push(Waypoint::visit(target, to)),
    }
    Ok(())
}

/// Converts a location sequence into waypoints. Travel starts from the
/// location nearest `current`, joining its route at the waypoint nearest
/// `current` (never the start location itself). Queued rooms end their leg
/// at the last slot until granted.
pub fn expand_actions(
    robot_id: RobotId,
    actions: &[LocationId],
    net: &RoadwayNetwork,
    current: DVec2,
) -> Result<WaypointPlan, NavigationError> {
    for &a in actions {
        net.location(a)?;
    }
    let mut plan = WaypointPlan::new(robot_id);
    let Some(&first) = actions.first() else {
        return Ok(plan);
    };
    let mut out = Vec::new();
    let start = net.nearest_location(current).ok_or(NavigationError::UnknownLocation(first))?;
    if start == first {
        push_leg(&mut out, &[], first, net, 0)?;
    } else {
        let route = net.route(start, first)?;
        let join = route
            .iter()
            .enumerate()
            .skip(1)
            .min_by(|(_, a), (_, b)| a.distance(current).total_cmp(&b.distance(current)))
            .map_or(1, |(i, _)| i);
        push_leg(&mut out, &route, first, net, join)?;
    }
    for pair in actions.windows(2) {
        if pair[0] == pair[1] {
            continue;
        }
        let route = net.route(pair[0], pair[1])?;
        push_leg(&mut out, &route, pair[1], net, 0)?;
    }
    plan.pending = out.into();
    Ok(plan)
}

/// Retargets the first slot waypoint for `q.room_id` to `index`. Once the
/// robot holds the room the slot is replaced by the room visit. Returns
/// whether the plan changed.
pub fn on_queue_position(plan: &mut WaypointPlan, q: &RoomQueue, net: &RoadwayNetwork, index: usize) -> bool {
    let Some(pos) = plan
        .pending
        .iter()
        .position(|w| matches!(w.kind, WaypointKind::Slot { room, .. } if room == q.room_id))
    else {
        return false;
    };
    let slot = q.slots[index.min(q.slots.len() - 1)];
    let mut changed = false;
    let w = &mut plan.pending[pos];
    if w.position != slot || w.kind != (WaypointKind::Slot { room: q.room_id, index }) {
        *w = Waypoint { position: slot, kind: WaypointKind::Slot { room: q.room_id, index } };
        changed = true;
    }
    if index == 0 && q.holder() == Some(plan.robot_id) {
        let room_pos = net.location(q.room_id).unwrap_or(slot);
        plan.pending[pos] = Waypoint::visit(room_pos, q.room_id);
        changed = true;
    }
    changed
}

/// Appends an arrival record; a repeat at the same or an earlier time is ignored.
pub fn record_arrival(plan: &mut WaypointPlan, waypoint: Waypoint, time: f64) -> bool {
    if plan.arrivals.last().is_some_and(|&(_, t)| time <= t) {
        return false;
    }
    plan.arrivals.push((waypoint, time));
    true
}
