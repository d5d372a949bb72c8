use glam::DVec2;
use serde::{Deserialize, Serialize};

use crate::ids::{LocationId, RobotId};

/// Every slot is taken; the requester holds position and retries next tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueueFull;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReleaseOutcome {
    /// Removed; `promoted` is the new holder, if any.
    Released { promoted: Option<RobotId> },
    /// Still too close to the room with tasks remaining.
    NotYet,
    NotMember,
}

/// FIFO access control for one room. The holder keeps index 0 until it releases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomQueue {
    pub room_id: LocationId,
    pub slots: Vec<DVec2>,
    occupants: Vec<RobotId>,
    holder: Option<RobotId>,
}

impl RoomQueue {
    pub fn new(room_id: LocationId, slots: Vec<DVec2>) -> Self {
        Self { room_id, slots, occupants: Vec::new(), holder: None }
    }

    pub fn occupants(&self) -> &[RobotId] {
        &self.occupants
    }

    pub fn holder(&self) -> Option<RobotId> {
        self.holder
    }

    pub fn position_of(&self, robot: RobotId) -> Option<usize> {
        self.occupants.iter().position(|&r| r == robot)
    }

    pub fn is_full(&self) -> bool {
        self.occupants.len() >= self.slots.len()
    }

    /// Appends `robot` and returns its index; idempotent for existing members.
    pub fn request_slot(&mut self, robot: RobotId) -> Result<usize, QueueFull> {
        if let Some(i) = self.position_of(robot) {
            return Ok(i);
        }
        if self.is_full() {
            return Err(QueueFull);
        }
        self.occupants.push(robot);
        self.promote();
        Ok(self.occupants.len() - 1)
    }

    /// Releases `robot` once it is farther than `release_distance` from the
    /// room or has no tasks left.
    pub fn release(
        &mut self,
        robot: RobotId,
        robot_position: DVec2,
        room_position: DVec2,
        release_distance: f64,
        tasks_exhausted: bool,
    ) -> ReleaseOutcome {
        if self.position_of(robot).is_none() {
            return ReleaseOutcome::NotMember;
        }
        if !(tasks_exhausted || robot_position.distance(room_position) > release_distance) {
            return ReleaseOutcome::NotYet;
        }
        let was_holder = self.holder == Some(robot);
        self.remove(robot);
        ReleaseOutcome::Released { promoted: if was_holder { self.holder } else { None } }
    }

    /// Drops a queued robot that no longer needs the room. The holder must use `release`.
    pub fn withdraw(&mut self, robot: RobotId) -> bool {
        if self.holder == Some(robot) || self.position_of(robot).is_none() {
            return false;
        }
        self.remove(robot);
        true
    }

    fn remove(&mut self, robot: RobotId) {
        self.occupants.retain(|&r| r != robot);
        if self.holder == Some(robot) {
            self.holder = None;
        }
        self.promote();
    }

    fn promote(&mut self) {
        if self.holder.is_none() {
            self.holder = self.occupants.first().copied();
        }
    }
}
