//! Load a bundled map, inflate it into a costmap and cast obstacle rays.
use mrta_sim::world::{inflate, load_map, raycast, InflationParams, Pose2};

fn main() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/warehouse_map.txt")).unwrap();
    let grid = load_map(&text).unwrap();
    println!("map {}x{} at {} m/cell, {} occupied", grid.width(), grid.height(), grid.resolution(), grid.occupied_count());

    let costmap = inflate(&grid, &InflationParams::default());
    let lethal = costmap.costs().iter().filter(|&&c| c == mrta_sim::world::COST_LETHAL).count();
    println!("lethal cells after inflation: {lethal}");

    // Close to the border wall in the lower-left corner.
    let (lo, _) = grid.geometry.bounds();
    let at = lo + glam::DVec2::new(1.8, 1.4);
    let hits = raycast(&grid, Pose2::new(at.x, at.y, 0.0), 16, 3.0).unwrap();
    println!("{} of 16 rays hit within 3 m of ({:.1}, {:.1})", hits.len(), at.x, at.y);
    for h in &hits.hits {
        println!("  ray {:2} -> ({:.2}, {:.2})", h.ray, h.point.x, h.point.y);
    }
}
