//! Cost-aware A* across the warehouse map and a look-ahead query on the result.
use glam::DVec2;
use mrta_sim::planner::{lookahead_point, plan, PlannerParams};
use mrta_sim::world::{inflate, load_map, InflationParams};

fn main() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/four_rooms_map.txt")).unwrap();
    let grid = load_map(&text).unwrap();
    let costmap = inflate(&grid, &InflationParams::default());
    let (lo, hi) = grid.geometry.bounds();
    let start = lo + DVec2::splat(1.5);
    let goal = hi - DVec2::splat(1.5);

    for weight in [0.0, 3.0] {
        match plan(&costmap, start, goal, &PlannerParams { cost_weight: weight }) {
            Ok(path) => {
                println!("cost_weight {weight}: {} points, total cost {:.3}", path.len(), path.total_cost);
                let ahead = lookahead_point(&path, start, 0.5).unwrap();
                println!("  look-ahead 0.5 m from start: ({:.2}, {:.2})", ahead.x, ahead.y);
            }
            Err(e) => println!("cost_weight {weight}: {e}"),
        }
    }
}
