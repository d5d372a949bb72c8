use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::TaskingError;
use crate::ids::LocationId;

/// Symmetric travel times (s) between system locations.
#[derive(Debug, Clone, PartialEq)]
pub struct TravelTimeGraph {
    locations: Vec<LocationId>,
    index: BTreeMap<LocationId, usize>,
    weights: Vec<Vec<f64>>,
}

impl TravelTimeGraph {
    pub fn new(locations: Vec<LocationId>, weights: Vec<Vec<f64>>) -> Result<Self, TaskingError> {
        let n = locations.len();
        let bad = |m: String| Err(TaskingError::InvalidGraph(m));
        let mut index = BTreeMap::new();
        for (i, &l) in locations.iter().enumerate() {
            if index.insert(l, i).is_some() {
                return bad(format!("duplicate location {l}"));
            }
        }
        if weights.len() != n || weights.iter().any(|r| r.len() != n) {
            return bad(format!("expected a {n}x{n} matrix"));
        }
        for i in 0..n {
            if weights[i][i] != 0.0 {
                return bad(format!("diagonal entry for location {} must be 0", locations[i]));
            }
            for j in 0..n {
                let w = weights[i][j];
                if i != j && !(w > 0.0 && w.is_finite()) {
                    return bad(format!("weight {}-{} must be positive and finite", locations[i], locations[j]));
                }
                if w != weights[j][i] {
                    return bad(format!("weight {}-{} is not symmetric", locations[i], locations[j]));
                }
            }
        }
        Ok(Self { locations, index, weights })
    }

    /// Complete graph with every off-diagonal weight equal to `w`.
    pub fn uniform(locations: Vec<LocationId>, w: f64) -> Result<Self, TaskingError> {
        let n = locations.len();
        let weights = (0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { w }).collect()).collect();
        Self::new(locations, weights)
    }

    pub fn locations(&self) -> &[LocationId] {
        &self.locations
    }

    pub fn contains(&self, l: LocationId) -> bool {
        self.index.contains_key(&l)
    }

    pub fn weight(&self, a: LocationId, b: LocationId) -> Result<f64, TaskingError> {
        let i = *self.index.get(&a).ok_or(TaskingError::UnknownLocation(a))?;
        let j = *self.index.get(&b).ok_or(TaskingError::UnknownLocation(b))?;
        Ok(self.weights[i][j])
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.weights
    }

    /// Header row of location ids, then one whitespace-separated row per location.
    /// Lines starting with `#` and blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self, TaskingError> {
        let mut rows = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = rows.next().ok_or(TaskingError::Parse { line: 1, message: "missing header row".into() })?;
        let locations = header
            .split_whitespace()
            .map(|t| t.parse::<LocationId>().map_err(|e| TaskingError::Parse { line: hl, message: format!("{t:?}: {e}") }))
            .collect::<Result<Vec<_>, _>>()?;
        let mut weights = Vec::new();
        for (line, row) in rows {
            let values = row
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| TaskingError::Parse { line, message: format!("{t:?}: {e}") }))
                .collect::<Result<Vec<_>, _>>()?;
            if values.len() != locations.len() {
                return Err(TaskingError::Parse {
                    line,
                    message: format!("expected {} values, found {}", locations.len(), values.len()),
                });
            }
            weights.push(values);
        }
        Self::new(locations, weights)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.locations.iter().map(|l| l.to_string()).collect();
        writeln!(out, "{}", header.join(" ")).unwrap();
        for row in &self.weights {
            let cells: Vec<String> = row.iter().map(|w| format!("{}", crate::geom::round_sig9(*w))).collect();
            writeln!(out, "{}", cells.join(" ")).unwrap();
        }
        out
    }
}
