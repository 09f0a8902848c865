use serde::{Deserialize, Serialize};

/// Static occupancy grid used to sanity-check waypoint legs.
///
/// `rows[0]` is the row at the lowest y; `#` marks an occupied cell and any
/// other character a free one. Cell `(col, row)` covers
/// `origin + [col, col+1) * resolution` by `origin + [row, row+1) * resolution`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OccupancyGrid {
    pub resolution_m: f64,
    pub origin: [f64; 2],
    pub rows: Vec<String>,
}

impl OccupancyGrid {
    pub(crate) fn validate(&self) -> Result<(), String> {
        if !(self.resolution_m > 0.0 && self.resolution_m.is_finite()) {
            return Err(format!(
                "resolution_m must be > 0, got {}",
                self.resolution_m
            ));
        }
        if self.rows.is_empty() {
            return Err("rows must not be empty".into());
        }
        let width = self.rows[0].chars().count();
        if let Some(i) = self.rows.iter().position(|r| r.chars().count() != width) {
            return Err(format!("row {i} width differs from row 0 ({width})"));
        }
        Ok(())
    }

    /// `None` outside the grid.
    pub fn is_occupied(&self, x: f64, y: f64) -> Option<bool> {
        let col = ((x - self.origin[0]) / self.resolution_m).floor();
        let row = ((y - self.origin[1]) / self.resolution_m).floor();
        if col < 0.0 || row < 0.0 {
            return None;
        }
        let line = self.rows.get(row as usize)?;
        line.chars().nth(col as usize).map(|c| c == '#')
    }

    /// First sample point along the segment that is occupied or off-grid.
    pub fn first_blocked_point(&self, from: (f64, f64), to: (f64, f64)) -> Option<(f64, f64)> {
        let len = (to.0 - from.0).hypot(to.1 - from.1);
        let steps = ((len / (self.resolution_m * 0.25)).ceil() as usize).max(1);
        (0..=steps)
            .map(|i| {
                let s = i as f64 / steps as f64;
                (from.0 + s * (to.0 - from.0), from.1 + s * (to.1 - from.1))
            })
            .find(|&(x, y)| self.is_occupied(x, y) != Some(false))
    }
}
