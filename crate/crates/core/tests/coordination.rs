use glam::DVec2;
use proptest::prelude::*;
use std::collections::{BTreeMap, BTreeSet};

use mrta_sim::coordination::{elect_leaders, form_clusters, neighbor_sets, AscendingId};
use mrta_sim::ids::RobotId;

/// Connectivity by Floyd-Warshall transitive closure of the proximity relation.
fn closure(points: &[DVec2], d: f64) -> Vec<Vec<bool>> {
    let n = points.len();
    let mut reach: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j || points[i].distance(points[j]) < d).collect()).collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                reach[i][j] = reach[i][j] || (reach[i][k] && reach[k][j]);
            }
        }
    }
    reach
}

proptest! {
    #[test]
    fn clusters_are_connected_components(
        pts in proptest::collection::vec((0.0f64..10.0, 0.0f64..10.0), 1..12),
        d in 0.5f64..4.0,
        active_mask in proptest::collection::vec(any::<bool>(), 12),
    ) {
        let points: Vec<DVec2> = pts.iter().map(|&(x, y)| DVec2::new(x, y)).collect();
        let positions: BTreeMap<RobotId, DVec2> = points.iter().enumerate().map(|(i, &p)| (RobotId(i), p)).collect();
        let partition = form_clusters(&neighbor_sets(&positions, d)).unwrap();
        let reach = closure(&points, d);
        let mut seen = BTreeSet::new();
        for c in &partition.clusters {
            for &a in &c.members {
                prop_assert!(seen.insert(a), "{} appears twice", a);
                for b in 0..points.len() {
                    prop_assert_eq!(c.contains(RobotId(b)), reach[a.0][b]);
                }
            }
        }
        prop_assert_eq!(seen.len(), points.len());

        let active: BTreeSet<RobotId> = (0..points.len()).filter(|&i| active_mask[i]).map(RobotId).collect();
        for c in elect_leaders(&partition, &active, &AscendingId).clusters {
            let want = c.members.iter().copied().find(|m| active.contains(m)).unwrap_or(c.members[0]);
            prop_assert_eq!(c.leader, Some(want));
            prop_assert_eq!(c.all_stop, !c.members.iter().any(|m| active.contains(m)));
        }
    }
}
