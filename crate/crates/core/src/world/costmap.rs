use serde::{Deserialize, Serialize};

use super::{GridGeometry, OccupancyGrid};

pub const COST_LETHAL: u8 = 255;
pub const COST_MAX_INFLATED: u8 = 254;
pub const COST_FREE: u8 = 0;

/// Exponential-decay inflation settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InflationParams {
    /// Cells farther than this from every obstacle get cost 0 (meters).
    pub inflation_radius: f64,
    /// Decay rate of the exponential (1/meters).
    pub cost_scale: f64,
    /// Inside this distance the cost saturates at 254 (meters, normally the robot radius).
    pub inscribed_radius: f64,
}

impl Default for InflationParams {
    fn default() -> Self {
        Self { inflation_radius: 1.0, cost_scale: 3.0, inscribed_radius: 0.3 }
    }
}

/// Per-cell traversal cost derived from an occupancy grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Costmap {
    pub geometry: GridGeometry,
    cost: Vec<u8>,
}

impl Costmap {
    pub fn from_costs(geometry: GridGeometry, cost: Vec<u8>) -> Self {
        assert_eq!(cost.len(), geometry.len(), "cost vector does not match geometry");
        Self { geometry, cost }
    }

    pub fn cost(&self, ix: usize, iy: usize) -> u8 {
        self.cost[self.geometry.index(ix, iy)]
    }

    pub fn cost_at_index(&self, index: usize) -> u8 {
        self.cost[index]
    }

    pub fn is_lethal(&self, ix: usize, iy: usize) -> bool {
        self.cost(ix, iy) == COST_LETHAL
    }

    pub fn costs(&self) -> &[u8] {
        &self.cost
    }

    /// Copy with the given cells forced lethal.
    pub fn with_lethal(&self, cells: impl IntoIterator<Item = usize>) -> Self {
        let mut out = self.clone();
        for i in cells {
            out.cost[i] = COST_LETHAL;
        }
        out
    }
}

/// Decay law shared by [`inflate`] and its tests: `254 * exp(-scale * (d - inscribed))`, clamped.
pub fn inflation_cost(distance: f64, params: &InflationParams) -> u8 {
    if distance > params.inflation_radius {
        return COST_FREE;
    }
    let raw = 254.0 * (-params.cost_scale * (distance - params.inscribed_radius)).exp();
    raw.clamp(0.0, 254.0).round() as u8
}

/// Builds the inflated costmap. Distances are measured between cell centers.
pub fn inflate(grid: &OccupancyGrid, params: &InflationParams) -> Costmap {
    let geo = grid.geometry;
    let res = geo.resolution;
    let mut nearest = vec![f64::INFINITY; geo.len()];
    let reach = if params.inflation_radius > 0.0 {
        (params.inflation_radius / res).floor() as isize
    } else {
        0
    };
    for (i, _) in grid.cells().iter().enumerate().filter(|(_, &c)| c) {
        let (ox, oy) = geo.coords(i);
        nearest[i] = 0.0;
        for dy in -reach..=reach {
            for dx in -reach..=reach {
                let (x, y) = (ox as isize + dx, oy as isize + dy);
                if x < 0 || y < 0 || x >= geo.width as isize || y >= geo.height as isize {
                    continue;
                }
                let d = ((dx * dx + dy * dy) as f64).sqrt() * res;
                let j = geo.index(x as usize, y as usize);
                if d < nearest[j] {
                    nearest[j] = d;
                }
            }
        }
    }
    let cost = nearest
        .iter()
        .zip(grid.cells())
        .map(|(&d, &occupied)| {
            if occupied {
                COST_LETHAL
            } else if d.is_finite() {
                inflation_cost(d, params)
            } else {
                COST_FREE
            }
        })
        .collect();
    Costmap { geometry: geo, cost }
}
