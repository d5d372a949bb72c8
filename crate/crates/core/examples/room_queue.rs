//! FIFO access to a single-occupancy room.
use glam::DVec2;
use mrta_sim::ids::RobotId;
use mrta_sim::navigation::{ReleaseOutcome, RoomQueue};

fn main() {
    let room = DVec2::new(10.0, 5.0);
    let slots = vec![room, DVec2::new(8.0, 5.0), DVec2::new(7.0, 5.0)];
    let mut q = RoomQueue::new(3, slots);
    for r in [2, 0, 1] {
        let slot = q.request_slot(RobotId(r)).unwrap();
        println!("robot {r} gets slot {slot}, holder {:?}", q.holder());
    }
    println!("full: {}", q.is_full());
    assert!(q.request_slot(RobotId(9)).is_err());

    // The holder is released only after leaving the release radius.
    let near = q.release(RobotId(2), DVec2::new(11.0, 5.0), room, 2.0, false);
    let far = q.release(RobotId(2), DVec2::new(13.0, 5.0), room, 2.0, false);
    println!("near: {near:?}, far: {far:?}");
    if let ReleaseOutcome::Released { promoted: Some(next) } = far {
        println!("{next} now holds the room; queue {:?}", q.occupants());
    }
}
