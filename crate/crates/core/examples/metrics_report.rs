//! Per-cluster-size QP timings and the real-time factor from a timed run.
use std::path::Path;

use mrta_sim::engine::{compute_metrics, load_scenario, run_with, RunOptions};

fn main() {
    let path = Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/data/warehouse.yaml"));
    let scenario = load_scenario(path, None).unwrap();
    let opts = RunOptions { record_timing: true, ..RunOptions::default() };
    let trace = run_with(&scenario, opts).unwrap();
    let report = compute_metrics(&trace);
    print!("{}", report.to_csv());
}
