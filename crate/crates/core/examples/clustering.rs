//! Neighbor sets, transitive-closure clusters and leader election.
use std::collections::{BTreeMap, BTreeSet};

use glam::DVec2;
use mrta_sim::coordination::{elect_leaders, form_clusters, neighbor_sets, AscendingId, DistanceToGoal};
use mrta_sim::ids::RobotId;

fn main() {
    // 0-1-2 form a chain, 3 stands alone.
    let positions: BTreeMap<RobotId, DVec2> = [(0.0, 0.0), (2.5, 0.0), (5.0, 0.5), (20.0, 0.0)]
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| (RobotId(i), DVec2::new(x, y)))
        .collect();
    let neighbors = neighbor_sets(&positions, 3.0);
    for (id, set) in &neighbors {
        println!("B({id}) = {set:?}");
    }
    let partition = form_clusters(&neighbors).unwrap();

    let active: BTreeSet<RobotId> = [RobotId(1), RobotId(2), RobotId(3)].into();
    let by_id = elect_leaders(&partition, &active, &AscendingId);
    let by_distance = DistanceToGoal { distance: BTreeMap::from([(RobotId(1), 8.0), (RobotId(2), 1.0)]) };
    let by_goal = elect_leaders(&partition, &active, &by_distance);
    for (a, b) in by_id.clusters.iter().zip(&by_goal.clusters) {
        println!("cluster {:?}: leader by id {:?}, by distance {:?}", a.members, a.leader, b.leader);
    }
}
