//! Measure the travel-time graph by driving a lone robot between every location pair.
use std::path::Path;

use mrta_sim::engine::load_scenario;
use mrta_sim::tasking::{collect_travel_times, Aggregation};

fn main() {
    let path = Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/data/four_rooms.yaml"));
    let scenario = load_scenario(path, None).unwrap();
    let max = collect_travel_times(&scenario, 2, Aggregation::Max).unwrap();
    let mean = collect_travel_times(&scenario, 2, Aggregation::Mean).unwrap();
    println!("worst case over start headings:\n{}", max.to_text());
    println!("mean:\n{}", mean.to_text());
}
