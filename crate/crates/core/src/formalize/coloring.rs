use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CellGrid, Lattice, INTERVAL_PADDING};

pub const COLORING_VERSION: u32 = 1;

/// A piecewise-constant coloring of the fundamental domain.
///
/// Colors are 1-based: `1..=c` are regular colors, each avoiding its entry of
/// `avoided_distances`, and `c + 1` is the unconstrained bonus color.
#[derive(Clone, Debug, PartialEq)]
pub struct CellColoring {
    grid: CellGrid,
    avoided_distances: Vec<f64>,
    colors: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct ColoringRepr {
    format_version: u32,
    lattice: Lattice,
    resolution: Vec<usize>,
    avoided_distances: Vec<f64>,
    colors: Vec<u32>,
}

impl CellColoring {
    /// Validates shapes and color range. Cells must be strictly smaller than
    /// every avoided distance, otherwise a cell would conflict with itself.
    pub fn new(lattice: Lattice, resolution: &[usize], avoided_distances: Vec<f64>, colors: Vec<u32>) -> Result<Self> {
        let grid = CellGrid::new(lattice, resolution)?;
        if avoided_distances.is_empty() {
            return Err(Error::invalid("need at least one regular color"));
        }
        if avoided_distances.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::invalid("avoided distances must be positive"));
        }
        if colors.len() != grid.cell_count() {
            return Err(Error::Shape(format!(
                "{} colors for {} cells",
                colors.len(),
                grid.cell_count()
            )));
        }
        let bonus = avoided_distances.len() as u32 + 1;
        if let Some(c) = colors.iter().find(|&&c| c == 0 || c > bonus) {
            return Err(Error::invalid(format!("color {c} outside 1..={bonus}")));
        }
        let min_d = avoided_distances.iter().copied().fold(f64::INFINITY, f64::min);
        if grid.cell_diameter() + INTERVAL_PADDING >= min_d {
            return Err(Error::invalid(format!(
                "cell diameter {:.4} is not below the smallest avoided distance {min_d}; refine the grid",
                grid.cell_diameter()
            )));
        }
        Ok(CellColoring {
            grid,
            avoided_distances,
            colors,
        })
    }

    /// Every cell colored `color`.
    pub fn filled(lattice: Lattice, resolution: &[usize], avoided_distances: Vec<f64>, color: u32) -> Result<Self> {
        let cells = resolution.iter().product();
        Self::new(lattice, resolution, avoided_distances, vec![color; cells])
    }

    pub fn grid(&self) -> &CellGrid {
        &self.grid
    }

    pub fn lattice(&self) -> &Lattice {
        self.grid.lattice()
    }

    pub fn resolution(&self) -> &[usize] {
        self.grid.resolution()
    }

    pub fn avoided_distances(&self) -> &[f64] {
        &self.avoided_distances
    }

    /// Number of regular colors `c`.
    pub fn num_colors(&self) -> usize {
        self.avoided_distances.len()
    }

    pub fn bonus_color(&self) -> u32 {
        self.avoided_distances.len() as u32 + 1
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn color(&self, cell: usize) -> u32 {
        self.colors[cell]
    }

    pub fn set_color(&mut self, cell: usize, color: u32) {
        assert!(color >= 1 && color <= self.bonus_color(), "color {color} out of range");
        self.colors[cell] = color;
    }

    /// Avoided distance of a regular color, `None` for the bonus color.
    pub fn distance_of(&self, color: u32) -> Option<f64> {
        (color >= 1 && color <= self.num_colors() as u32).then(|| self.avoided_distances[color as usize - 1])
    }

    pub fn bonus_count(&self) -> usize {
        let b = self.bonus_color();
        self.colors.iter().filter(|&&c| c == b).count()
    }

    /// Exact area fraction of bonus cells.
    pub fn bonus_fraction(&self) -> f64 {
        self.bonus_count() as f64 / self.colors.len() as f64
    }

    /// Color of the periodic extension at a point.
    pub fn color_at(&self, point: &[f64]) -> u32 {
        self.colors[self.grid.locate(point)]
    }

    pub fn to_json(&self) -> String {
        let repr = ColoringRepr {
            format_version: COLORING_VERSION,
            lattice: self.lattice().clone(),
            resolution: self.resolution().to_vec(),
            avoided_distances: self.avoided_distances.clone(),
            colors: self.colors.clone(),
        };
        serde_json::to_string(&repr).expect("coloring serializes")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let corrupt = |reason: String| Error::Corrupt {
            path: path.to_path_buf(),
            reason,
        };
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| corrupt(e.to_string()))?;
        match value.get("format_version").and_then(|v| v.as_u64()) {
            Some(v) if v == COLORING_VERSION as u64 => {}
            Some(v) => return Err(Error::UnsupportedVersion(v.min(u32::MAX as u64) as u32)),
            None => return Err(corrupt("missing format_version".into())),
        }
        let repr: ColoringRepr = serde_json::from_value(value).map_err(|e| corrupt(e.to_string()))?;
        Self::new(repr.lattice, &repr.resolution, repr.avoided_distances, repr.colors)
            .map_err(|e| corrupt(e.to_string()))
    }
}
