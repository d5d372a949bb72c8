//! Render a short run as SVG frames, one every five simulated seconds.
use std::path::Path;

use mrta_sim::engine::{load_scenario, run};
use mrta_sim::render::{render_frames, RenderStyle};

fn main() {
    let path = Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/data/warehouse.yaml"));
    let mut scenario = load_scenario(path, None).unwrap();
    scenario.config.duration = 30.0;
    let trace = run(&scenario).unwrap();

    let frames = render_frames(&trace, &scenario.grid, 5.0, &RenderStyle::default());
    let dir = std::env::temp_dir().join("mrta_frames");
    std::fs::create_dir_all(&dir).unwrap();
    for (k, f) in frames.iter().enumerate() {
        let file = dir.join(format!("frame_{k:05}.svg"));
        std::fs::write(&file, &f.svg).unwrap();
        println!("t={:5.1} -> {} ({} bytes)", f.time, file.display(), f.svg.len());
    }
}
