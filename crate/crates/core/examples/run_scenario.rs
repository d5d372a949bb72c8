//! Run the bundled two-robot scenario headlessly and summarise the trace.
use std::path::Path;

use mrta_sim::engine::{compute_metrics, load_scenario, run, Event};

fn main() {
    let path = Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/data/four_rooms.yaml"));
    let scenario = load_scenario(path, None).unwrap();
    println!("scenario digest {}", &scenario.digest[..16]);
    let trace = run(&scenario).unwrap();
    println!("{} events over {} s", trace.events.len(), scenario.config.duration);

    for e in &trace.events {
        if let Event::Dropoff { .. } | Event::Pickup { .. } = e {
            println!("  {}", serde_json::to_string(e).unwrap());
        }
    }
    let out = std::env::temp_dir().join("four_rooms.trace");
    trace.write(&out).unwrap();
    println!("trace written to {}", out.display());
    print!("{}", compute_metrics(&trace).to_text());
}
