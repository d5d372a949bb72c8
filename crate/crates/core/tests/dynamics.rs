mod common;

use glam::DVec2;
use proptest::prelude::*;

use mrta_sim::dynamics::{step_human, step_robot, Control, HumanParams, HumanState, RobotState};
use mrta_sim::world::ObstaclePointSet;

proptest! {
    #[test]
    fn rk4_matches_closed_form(
        x in -5.0f64..5.0, y in -5.0f64..5.0, th in -3.0f64..3.0, v in -0.5f64..0.5,
        a in -0.5f64..0.5, w in -2.0f64..2.0,
    ) {
        let s0 = RobotState::new(x, y, th, v);
        let u = Control::new(a, w);
        let mut s = s0;
        for k in 1..=20 {
            s = step_robot(s, u, 0.05, 10.0).unwrap();
            let want = common::unicycle_closed_form(s0, u, 0.05 * k as f64);
            prop_assert!(DVec2::new(s.x - want.x, s.y - want.y).length() < 1e-6);
            prop_assert!((s.v - want.v).abs() < 1e-9);
        }
    }

    #[test]
    fn speed_never_exceeds_limit(v in -1.0f64..1.0, a in -5.0f64..5.0, dt in 0.001f64..0.5) {
        let s = step_robot(RobotState::new(0.0, 0.0, 0.0, v), Control::new(a, 0.3), dt, 1.0).unwrap();
        prop_assert!(s.v.abs() <= 1.0);
        prop_assert!(s.theta > -std::f64::consts::PI && s.theta <= std::f64::consts::PI);
    }

    #[test]
    fn human_speed_is_capped(gx in -10.0f64..10.0, gy in -10.0f64..10.0, ox in -1.0f64..1.0, oy in -1.0f64..1.0) {
        let p = HumanParams::default();
        let mut h = HumanState::new(DVec2::ZERO, vec![DVec2::new(gx, gy)]);
        let robots = [RobotState::new(ox, oy, 0.0, 0.0)];
        let obstacles = ObstaclePointSet::from_points([DVec2::new(-ox, -oy)]);
        for _ in 0..20 {
            h = step_human(&h, &robots, 0.3, &[], &obstacles, 0.05, &p).unwrap();
            prop_assert!(h.velocity.length() <= p.max_speed_factor * p.v_desired + 1e-9);
        }
    }
}
