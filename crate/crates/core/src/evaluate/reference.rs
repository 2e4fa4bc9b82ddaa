use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::ColoringFunction;

/// Analytic one-hot colorings used as oracles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ReferenceColoringId {
    /// Every point gets `color` (0-based) out of `colors`.
    Constant { colors: usize, color: usize },
    /// The uniform distribution over `colors`.
    Uniform { colors: usize },
    /// Horizontal half-open stripes `[i w, (i + 1) w)` colored `i mod colors`.
    Stripes { width: f64, colors: usize },
    /// Regular hexagons of side `side`, seven colors in the classical pattern.
    Hexagonal7 { side: f64 },
    /// Open disks of `radius` centered on a hexagonal lattice of `spacing`;
    /// everything else is the bonus color (second output).
    Disks1 { radius: f64, spacing: f64 },
}

impl ReferenceColoringId {
    pub fn hexagonal7() -> Self {
        ReferenceColoringId::Hexagonal7 { side: 0.4 }
    }

    /// Stripes of width `sqrt(3)/2`, avoiding monochromatic unit triangles.
    pub fn triangle_stripes() -> Self {
        ReferenceColoringId::Stripes {
            width: 3f64.sqrt() / 2.0,
            colors: 2,
        }
    }

    /// Unit-diameter open disks whose closest points are exactly 1 apart.
    pub fn disks1() -> Self {
        ReferenceColoringId::Disks1 {
            radius: 0.5,
            spacing: 2.0,
        }
    }
}

/// An analytic coloring, optionally ignoring appended parameter inputs.
#[derive(Clone, Debug)]
pub struct ReferenceColoring {
    id: ReferenceColoringId,
    ignored_params: usize,
}

/// Builds a reference coloring after checking its validity window.
pub fn reference_coloring(id: ReferenceColoringId) -> Result<ReferenceColoring> {
    match &id {
        ReferenceColoringId::Constant { colors, color } => {
            if *colors == 0 || color >= colors {
                return Err(Error::invalid(format!("constant color {color} out of {colors}")));
            }
        }
        ReferenceColoringId::Uniform { colors } if *colors == 0 => {
            return Err(Error::invalid("uniform coloring needs a color"));
        }
        ReferenceColoringId::Stripes { width, colors } => {
            if !(*width > 0.0 && width.is_finite()) || *colors == 0 {
                return Err(Error::invalid(format!("bad stripes: width {width}, {colors} colors")));
            }
        }
        ReferenceColoringId::Hexagonal7 { side } => {
            // diameter 2s below 1, same-color gap sqrt(7) s above 1
            let lo = 1.0 / 7f64.sqrt();
            if !(*side > lo && *side < 0.5) {
                return Err(Error::invalid(format!(
                    "hexagon side must lie in ({lo:.4}, 0.5), got {side}"
                )));
            }
        }
        ReferenceColoringId::Disks1 { radius, spacing }
            if !(*radius > 0.0 && *radius <= 0.5 && *spacing >= 2.0 * radius + 1.0) =>
        {
            return Err(Error::invalid(format!(
                "disks need radius in (0, 0.5] and spacing >= 2 r + 1, got r = {radius}, spacing = {spacing}"
            )));
        }
        _ => {}
    }
    Ok(ReferenceColoring { id, ignored_params: 0 })
}

/// Nearest center of the hexagonal lattice spanned by `(a, 0)` and
/// `(a/2, a sqrt(3)/2)`, in axial coordinates.
fn hex_round(x: f64, y: f64, a: f64) -> (i64, i64) {
    let r = y / (a * 3f64.sqrt() / 2.0);
    let q = x / a - r / 2.0;
    let (s, t) = (-q - r, r);
    let (mut rq, mut rr, rs) = (q.round(), t.round(), s.round());
    let (dq, dr, ds) = ((rq - q).abs(), (rr - t).abs(), (rs - s).abs());
    if dq > dr && dq > ds {
        rq = -rr - rs;
    } else if dr > ds {
        rr = -rq - rs;
    }
    (rq as i64, rr as i64)
}

fn hex_center(q: i64, r: i64, a: f64) -> (f64, f64) {
    (a * (q as f64 + r as f64 / 2.0), a * 3f64.sqrt() / 2.0 * r as f64)
}

impl ReferenceColoring {
    pub fn id(&self) -> &ReferenceColoringId {
        &self.id
    }

    /// Same coloring, accepting (and ignoring) `n` appended parameters.
    pub fn ignoring_params(mut self, n: usize) -> Self {
        self.ignored_params = n;
        self
    }

    /// Color index at a planar point.
    pub fn color_at(&self, x: f64, y: f64) -> usize {
        match self.id {
            ReferenceColoringId::Constant { color, .. } => color,
            ReferenceColoringId::Uniform { .. } => 0,
            ReferenceColoringId::Stripes { width, colors } => (y / width).floor().rem_euclid(colors as f64) as usize,
            ReferenceColoringId::Hexagonal7 { side } => {
                let (q, r) = hex_round(x, y, side * 3f64.sqrt());
                (q + 3 * r).rem_euclid(7) as usize
            }
            ReferenceColoringId::Disks1 { radius, spacing } => {
                let (q, r) = hex_round(x, y, spacing);
                let (cx, cy) = hex_center(q, r, spacing);
                if (x - cx).hypot(y - cy) < radius {
                    0
                } else {
                    1
                }
            }
        }
    }
}

impl ColoringFunction for ReferenceColoring {
    fn spatial_dim(&self) -> usize {
        2
    }

    fn param_count(&self) -> usize {
        self.ignored_params
    }

    fn num_outputs(&self) -> usize {
        match self.id {
            ReferenceColoringId::Constant { colors, .. }
            | ReferenceColoringId::Uniform { colors }
            | ReferenceColoringId::Stripes { colors, .. } => colors,
            ReferenceColoringId::Hexagonal7 { .. } => 7,
            ReferenceColoringId::Disks1 { .. } => 2,
        }
    }

    fn evaluate(&self, inputs: &[f64]) -> Result<Vec<f64>> {
        let w = 2 + self.ignored_params;
        if !inputs.len().is_multiple_of(w) {
            return Err(Error::DimensionMismatch {
                expected: w,
                actual: inputs.len() % w,
            });
        }
        let c = self.num_outputs();
        let mut out = vec![0.0; inputs.len() / w * c];
        for (row, p) in inputs.chunks(w).zip(out.chunks_mut(c)) {
            if let ReferenceColoringId::Uniform { .. } = self.id {
                p.fill(1.0 / c as f64);
            } else {
                p[self.color_at(row[0], row[1])] = 1.0;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validity_windows() {
        assert!(reference_coloring(ReferenceColoringId::Hexagonal7 { side: 0.5 }).is_err());
        assert!(reference_coloring(ReferenceColoringId::Hexagonal7 { side: 0.35 }).is_err());
        assert!(reference_coloring(ReferenceColoringId::Constant { colors: 2, color: 2 }).is_err());
        assert!(reference_coloring(ReferenceColoringId::Disks1 {
            radius: 0.5,
            spacing: 1.9
        })
        .is_err());
    }

    #[test]
    fn hexagons_have_seven_distinct_neighbors() {
        let h = reference_coloring(ReferenceColoringId::hexagonal7()).unwrap();
        let a = 0.4 * 3f64.sqrt();
        for (q0, r0) in [(0, 0), (3, -2), (-5, 4)] {
            let mut seen: Vec<usize> = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)]
                .iter()
                .map(|(dq, dr)| {
                    let (x, y) = hex_center(q0 + dq, r0 + dr, a);
                    h.color_at(x, y)
                })
                .collect();
            seen.sort();
            assert_eq!(seen, (0..7).collect::<Vec<_>>());
        }
    }

    #[test]
    fn stripes_are_half_open() {
        let s = reference_coloring(ReferenceColoringId::Stripes { width: 0.5, colors: 2 }).unwrap();
        assert_eq!(s.color_at(0.0, 0.0), 0);
        assert_eq!(s.color_at(0.0, 0.5), 1);
        assert_eq!(s.color_at(0.0, -1e-12), 1);
        let t = reference_coloring(ReferenceColoringId::triangle_stripes()).unwrap();
        let pts = [(0.0, 0.0), (1.0, 0.0), (0.5, 3f64.sqrt() / 2.0)];
        let colors: Vec<usize> = pts.iter().map(|p| t.color_at(p.0, p.1)).collect();
        assert!(colors.iter().any(|&c| c != colors[0]));
    }

    #[test]
    fn disks_are_open() {
        let d = reference_coloring(ReferenceColoringId::disks1()).unwrap();
        assert_eq!(d.color_at(0.0, 0.0), 0);
        assert_eq!(d.color_at(0.49, 0.0), 0);
        assert_eq!(d.color_at(0.5, 0.0), 1);
        assert_eq!(d.color_at(2.0, 0.0), 0);
        assert_eq!(d.color_at(1.0, 0.0), 1);
    }
}
