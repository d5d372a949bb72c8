use glam::DVec2;
use serde::{Deserialize, Serialize};

use super::WorldError;

/// Placement of a regular grid in the world frame.
///
/// Cell `(ix, iy)` covers `[origin + (ix, iy) * resolution, origin + (ix + 1, iy + 1) * resolution)`.
/// `iy` grows with world y, so row 0 is the bottom of the map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridGeometry {
    pub width: usize,
    pub height: usize,
    pub resolution: f64,
    pub origin: DVec2,
}

impl GridGeometry {
    pub fn new(width: usize, height: usize, resolution: f64, origin: DVec2) -> Result<Self, WorldError> {
        if width == 0 || height == 0 {
            return Err(WorldError::InvalidGeometry(format!(
                "grid dimensions must be positive, got {width}x{height}"
            )));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(WorldError::InvalidGeometry(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        if !origin.is_finite() {
            return Err(WorldError::InvalidGeometry("origin must be finite".into()));
        }
        Ok(Self { width, height, resolution, origin })
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.width + ix
    }

    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index % self.width, index / self.width)
    }

    /// Cell containing `p`, or `None` outside the map. Never wraps.
    pub fn world_to_cell(&self, p: DVec2) -> Option<(usize, usize)> {
        let g = (p - self.origin) / self.resolution;
        if !g.is_finite() || g.x < 0.0 || g.y < 0.0 {
            return None;
        }
        let (ix, iy) = (g.x.floor() as usize, g.y.floor() as usize);
        (ix < self.width && iy < self.height).then_some((ix, iy))
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> DVec2 {
        self.origin + DVec2::new(ix as f64 + 0.5, iy as f64 + 0.5) * self.resolution
    }

    pub fn contains(&self, p: DVec2) -> bool {
        self.world_to_cell(p).is_some()
    }

    /// World-frame extent `(min, max)`.
    pub fn bounds(&self) -> (DVec2, DVec2) {
        let size = DVec2::new(self.width as f64, self.height as f64) * self.resolution;
        (self.origin, self.origin + size)
    }
}

/// Static occupancy map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyGrid {
    pub geometry: GridGeometry,
    cells: Vec<bool>,
}

impl OccupancyGrid {
    pub fn new(geometry: GridGeometry, cells: Vec<bool>) -> Result<Self, WorldError> {
        if cells.len() != geometry.len() {
            return Err(WorldError::InvalidGeometry(format!(
                "expected {} cells, got {}",
                geometry.len(),
                cells.len()
            )));
        }
        Ok(Self { geometry, cells })
    }

    pub fn empty(geometry: GridGeometry) -> Self {
        let cells = vec![false; geometry.len()];
        Self { geometry, cells }
    }

    pub fn width(&self) -> usize {
        self.geometry.width
    }

    pub fn height(&self) -> usize {
        self.geometry.height
    }

    pub fn resolution(&self) -> f64 {
        self.geometry.resolution
    }

    pub fn is_occupied(&self, ix: usize, iy: usize) -> bool {
        self.cells[self.geometry.index(ix, iy)]
    }

    pub fn set_occupied(&mut self, ix: usize, iy: usize, occupied: bool) {
        let i = self.geometry.index(ix, iy);
        self.cells[i] = occupied;
    }

    /// True when `p` lies on an occupied cell. Points off the map count as free.
    pub fn is_occupied_at(&self, p: DVec2) -> bool {
        self.geometry
            .world_to_cell(p)
            .is_some_and(|(ix, iy)| self.is_occupied(ix, iy))
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Distance from `p` to the closest point of any occupied cell.
    ///
    /// Returns `f64::INFINITY` when the map has no occupied cells.
    pub fn distance_to_occupied(&self, p: DVec2) -> f64 {
        let res = self.geometry.resolution;
        let mut best = f64::INFINITY;
        for (i, _) in self.cells.iter().enumerate().filter(|(_, &c)| c) {
            let (ix, iy) = self.geometry.coords(i);
            let lo = self.geometry.origin + DVec2::new(ix as f64, iy as f64) * res;
            let hi = lo + DVec2::splat(res);
            let closest = p.clamp(lo, hi);
            best = best.min(closest.distance(p));
        }
        best
    }

    /// Parses the ASCII map format.
    ///
    /// ```text
    /// map <width> <height> <resolution> <origin_x> <origin_y>
    /// ```
    /// followed by `height` rows of exactly `width` characters from `#` and `.`.
    /// The first body row is the top of the map.
    pub fn parse(text: &str) -> Result<Self, WorldError> {
        let mut lines = text.lines().enumerate();
        let (header_no, header) = lines
            .by_ref()
            .find(|(_, l)| !l.trim().is_empty())
            .ok_or_else(|| WorldError::parse(1, "missing header"))?;
        let header_line = header_no + 1;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 6 || fields[0] != "map" {
            return Err(WorldError::parse(
                header_line,
                "header must be `map <width> <height> <resolution> <origin_x> <origin_y>`",
            ));
        }
        let width: usize = fields[1]
            .parse()
            .map_err(|_| WorldError::parse(header_line, "width is not an integer"))?;
        let height: usize = fields[2]
            .parse()
            .map_err(|_| WorldError::parse(header_line, "height is not an integer"))?;
        let number = |s: &str, what: &str| -> Result<f64, WorldError> {
            s.parse::<f64>()
                .map_err(|_| WorldError::parse(header_line, format!("{what} is not a number")))
        };
        let resolution = number(fields[3], "resolution")?;
        let origin = DVec2::new(number(fields[4], "origin_x")?, number(fields[5], "origin_y")?);
        let geometry = GridGeometry::new(width, height, resolution, origin)
            .map_err(|e| WorldError::parse(header_line, e.to_string()))?;

        let mut cells = vec![false; geometry.len()];
        let mut rows = 0usize;
        let mut last_line = header_line;
        for (no, line) in lines {
            let line_no = no + 1;
            let row = line.trim_end_matches('\r');
            if row.trim().is_empty() {
                continue;
            }
            last_line = line_no;
            if rows == height {
                return Err(WorldError::parse(line_no, format!("more than {height} rows")));
            }
            let chars: Vec<char> = row.chars().collect();
            if chars.len() != width {
                return Err(WorldError::parse(
                    line_no,
                    format!("row has {} characters, expected {width}", chars.len()),
                ));
            }
            let iy = height - 1 - rows;
            for (ix, ch) in chars.into_iter().enumerate() {
                cells[geometry.index(ix, iy)] = match ch {
                    '#' => true,
                    '.' => false,
                    other => {
                        return Err(WorldError::parse(line_no, format!("unknown cell character {other:?}")))
                    }
                };
            }
            rows += 1;
        }
        if rows != height {
            return Err(WorldError::parse(
                last_line + 1,
                format!("expected {height} rows, found {rows}"),
            ));
        }
        Ok(Self { geometry, cells })
    }

    /// Serializes back to the ASCII map format.
    pub fn to_map_text(&self) -> String {
        let g = &self.geometry;
        let mut out = format!(
            "map {} {} {} {} {}\n",
            g.width, g.height, g.resolution, g.origin.x, g.origin.y
        );
        for iy in (0..g.height).rev() {
            for ix in 0..g.width {
                out.push(if self.is_occupied(ix, iy) { '#' } else { '.' });
            }
            out.push('\n');
        }
        out
    }
}

/// Parses a map file's content.
pub fn load_map(text: &str) -> Result<OccupancyGrid, WorldError> {
    OccupancyGrid::parse(text)
}
