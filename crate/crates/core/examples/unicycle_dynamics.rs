//! Integrate a robot under constant control and walk a pedestrian to a goal.
use glam::DVec2;
use mrta_sim::dynamics::{step_human, step_robot, Control, HumanParams, HumanState, RobotState};
use mrta_sim::world::ObstaclePointSet;

fn main() {
    let mut s = RobotState::new(0.0, 0.0, 0.0, 0.2);
    let u = Control::new(0.5, 0.8);
    for k in 1..=20 {
        s = step_robot(s, u, 0.05, 1.0).unwrap();
        if k % 5 == 0 {
            println!("t={:.2} x={:.4} y={:.4} theta={:.4} v={:.4}", 0.05 * k as f64, s.x, s.y, s.theta, s.v);
        }
    }

    // A robot parked on the straight line pushes the pedestrian aside.
    let p = HumanParams::default();
    let robots = [RobotState::new(2.5, 0.1, 0.0, 0.0)];
    let goal = DVec2::new(5.0, 0.0);
    let mut h = HumanState::new(DVec2::ZERO, vec![goal]);
    let mut t = 0.0;
    let mut max_offset: f64 = 0.0;
    while h.position.distance(goal) > p.waypoint_tolerance && t < 20.0 {
        h = step_human(&h, &robots, 0.3, &[], &ObstaclePointSet::default(), 0.05, &p).unwrap();
        t += 0.05;
        max_offset = max_offset.max(h.position.y.abs());
    }
    println!("pedestrian reached ({:.2}, {:.2}) after {t:.2} s, max lateral offset {max_offset:.2} m", h.position.x, h.position.y);
}
