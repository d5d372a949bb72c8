//! Two robots driving head-on: the joint CBF-QP bends their nominal controls.
use std::collections::BTreeMap;

use mrta_sim::dynamics::{Control, RobotState};
use mrta_sim::ids::RobotId;
use mrta_sim::safety_control::{pair_barrier, solve_cluster_qp, ControllerParams};

fn main() {
    let p = ControllerParams::default();
    let ids = [RobotId(0), RobotId(1)];
    let states = BTreeMap::from([
        (ids[0], RobotState::new(0.0, 0.0, 0.0, 1.0)),
        (ids[1], RobotState::new(1.6, 0.05, std::f64::consts::PI, 1.0)),
    ]);
    let nominals = BTreeMap::from([(ids[0], Control::new(1.0, 0.0)), (ids[1], Control::new(1.0, 0.0))]);

    let d = solve_cluster_qp(&ids, &states, &nominals, &BTreeMap::new(), &[], &p).unwrap();
    println!("status {} after {} iterations, objective {:.4}", d.qp_status.as_str(), d.iterations, d.objective);
    for (id, u) in &d.controls {
        println!("  {id}: a={:+.4} omega={:+.4}", u.a, u.omega);
    }
    for (c, r) in d.constraints.iter().zip(&d.residuals) {
        println!("  {:?} residual {r:.2e}", c.kind);
    }
    let b = pair_barrier(&states[&ids[0]], d.controls[&ids[0]], &states[&ids[1]], d.controls[&ids[1]], p.r_safe);
    println!("barrier h={:.4} h_dot={:.4} h_ddot={:.4}", b.h, b.h_dot, b.h_ddot);
}
