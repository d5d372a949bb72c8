//! Neighbor sets, proximity clusters and leader election.

use glam::DVec2;
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

use crate::ids::RobotId;

pub type NeighborSets = BTreeMap<RobotId, BTreeSet<RobotId>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoordinationError {
    #[error("neighbor sets are asymmetric: {0} lists {1} but not vice versa")]
    Asymmetric(RobotId, RobotId),
    #[error("{0} lists unknown neighbor {1}")]
    UnknownNeighbor(RobotId, RobotId),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    /// Ascending ids.
    pub members: Vec<RobotId>,
    /// `None` until leaders are elected.
    pub leader: Option<RobotId>,
    /// Members that are active, in priority order.
    pub active_members: Vec<RobotId>,
    /// No active member: every member receives a stop nominal.
    pub all_stop: bool,
}

impl Cluster {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, id: RobotId) -> bool {
        self.members.binary_search(&id).is_ok()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterPartition {
    /// Sorted by smallest member id.
    pub clusters: Vec<Cluster>,
}

impl ClusterPartition {
    pub fn cluster_of(&self, id: RobotId) -> Option<&Cluster> {
        self.clusters.iter().find(|c| c.contains(id))
    }
}

/// `B_i = { j != i : |p_j - p_i| < d_neighbor }`.
pub fn neighbor_sets(positions: &BTreeMap<RobotId, DVec2>, d_neighbor: f64) -> NeighborSets {
    let mut out: NeighborSets = positions.keys().map(|&id| (id, BTreeSet::new())).collect();
    let items: Vec<(RobotId, DVec2)> = positions.iter().map(|(&i, &p)| (i, p)).collect();
    for (a, &(i, pi)) in items.iter().enumerate() {
        for &(j, pj) in &items[a + 1..] {
            if pi.distance(pj) < d_neighbor {
                out.get_mut(&i).unwrap().insert(j);
                out.get_mut(&j).unwrap().insert(i);
            }
        }
    }
    out
}

/// Connected components of the neighbor graph.
pub fn form_clusters(neighbors: &NeighborSets) -> Result<ClusterPartition, CoordinationError> {
    let ids: Vec<RobotId> = neighbors.keys().copied().collect();
    let index = |id: RobotId| ids.binary_search(&id).ok();
    let mut uf = UnionFind::<usize>::new(ids.len());
    for (a, (&i, set)) in neighbors.iter().enumerate() {
        for &j in set {
            let b = index(j).ok_or(CoordinationError::UnknownNeighbor(i, j))?;
            if !neighbors[&j].contains(&i) {
                return Err(CoordinationError::Asymmetric(i, j));
            }
            uf.union(a, b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<RobotId>> = BTreeMap::new();
    for (a, &id) in ids.iter().enumerate() {
        groups.entry(uf.find(a)).or_default().push(id);
    }
    let mut clusters: Vec<Cluster> = groups
        .into_values()
        .map(|members| Cluster { members, leader: None, active_members: Vec::new(), all_stop: false })
        .collect();
    clusters.sort_by_key(|c| c.members[0]);
    Ok(ClusterPartition { clusters })
}

/// Total order on robots; `Ordering::Less` means higher priority.
pub trait Priority {
    fn compare(&self, a: RobotId, b: RobotId) -> Ordering;
}

/// Lower id wins.
#[derive(Debug, Clone, Copy, Default)]
pub struct AscendingId;

impl Priority for AscendingId {
    fn compare(&self, a: RobotId, b: RobotId) -> Ordering {
        a.cmp(&b)
    }
}

/// Shorter remaining distance wins; ties and missing entries fall back to id.
#[derive(Debug, Clone, Default)]
pub struct DistanceToGoal {
    pub distance: BTreeMap<RobotId, f64>,
}

impl Priority for DistanceToGoal {
    fn compare(&self, a: RobotId, b: RobotId) -> Ordering {
        let da = self.distance.get(&a).copied().unwrap_or(f64::INFINITY);
        let db = self.distance.get(&b).copied().unwrap_or(f64::INFINITY);
        da.total_cmp(&db).then(a.cmp(&b))
    }
}

pub fn elect_leaders(partition: &ClusterPartition, active: &BTreeSet<RobotId>, priority: &dyn Priority) -> ClusterPartition {
    let clusters = partition
        .clusters
        .iter()
        .map(|c| {
            let mut ranked = c.members.clone();
            ranked.sort_by(|&a, &b| priority.compare(a, b));
            let active_members: Vec<RobotId> = ranked.iter().copied().filter(|id| active.contains(id)).collect();
            let all_stop = active_members.is_empty();
            let leader = active_members.first().or(ranked.first()).copied();
            Cluster { members: c.members.clone(), leader, active_members, all_stop }
        })
        .collect();
    ClusterPartition { clusters }
}
