use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CellColoring;
use crate::geometry::{cell_distance_interval, lattice_translates, DistanceInterval};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub cell_a: Vec<usize>,
    pub cell_b: Vec<usize>,
    pub translate: Vec<i64>,
    pub color: u32,
    pub distance: f64,
    pub interval: [f64; 2],
}

/// Outcome of an exact certification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub certified: bool,
    pub violations: Vec<Violation>,
    pub bonus_cells: usize,
    pub cell_count: usize,
    pub bonus_fraction: f64,
}

impl VerificationReport {
    /// JSON with the bonus fraction rounded to six significant digits.
    pub fn to_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("report serializes");
        let rounded: f64 = format!("{:.5e}", self.bonus_fraction)
            .parse()
            .expect("float round trip");
        value["bonus_fraction"] = rounded.into();
        serde_json::to_string_pretty(&value).expect("report serializes")
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "certified: {}, violations: {}, bonus fraction: {} ({} of {} cells)",
            self.certified,
            self.violations.len(),
            format_sig6(self.bonus_fraction),
            self.bonus_cells,
            self.cell_count
        );
        s
    }
}

/// Six significant digits.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let digits = (5 - x.abs().log10().floor() as i32).max(0) as usize;
    format!("{x:.digits$}")
}

/// Checks every same-colored pair of cells (including translates) against
/// the avoided distance of their color.
///
/// Candidate partners of a cell are found by scanning, for each lattice
/// translate within reach, the block of cells whose centers could lie at the
/// avoided distance; each surviving pair gets its own distance interval.
pub fn verify(coloring: &CellColoring) -> VerificationReport {
    let grid = coloring.grid();
    let lattice = grid.lattice();
    let dim = grid.dim();
    let res = grid.resolution();
    let diam = grid.cell_diameter();
    let bonus = coloring.bonus_color();
    let max_d = coloring.avoided_distances().iter().copied().fold(0.0, f64::max);
    let translates = lattice_translates(lattice, max_d + diam);
    let translate_vectors: Vec<Vec<f64>> = translates.iter().map(|t| lattice.combination(t)).collect();
    let inv = lattice.inverse();
    let row_norms: Vec<f64> = (0..dim)
        .map(|r| inv[r * dim..(r + 1) * dim].iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    let slack = diam + 2e-9;

    let violations: Vec<Violation> = (0..grid.cell_count())
        .into_par_iter()
        .flat_map_iter(|a| {
            let mut found = Vec::new();
            let color = coloring.color(a);
            if color == bonus {
                return found.into_iter();
            }
            let d = coloring.distance_of(color).expect("regular color");
            let ia = grid.unlinear(a);
            let ca = grid.center(&ia);
            for (t, tv) in translates.iter().zip(&translate_vectors) {
                // centers of b + t within d + slack of ca
                let q: Vec<f64> = ca.iter().zip(tv).map(|(x, y)| x - y).collect();
                let fq = lattice.to_fractional(&q);
                let r = d + slack;
                let ranges: Vec<(usize, usize)> = (0..dim)
                    .map(|i| {
                        let k = res[i] as f64;
                        let lo = ((fq[i] - r * row_norms[i]) * k - 0.5).floor().max(0.0);
                        let hi = ((fq[i] + r * row_norms[i]) * k - 0.5).ceil().min(k - 1.0);
                        (lo as usize, hi.max(-1.0) as isize as usize)
                    })
                    .collect();
                if ranges.iter().any(|&(lo, hi)| hi == usize::MAX || lo > hi) {
                    continue;
                }
                let mut ib: Vec<usize> = ranges.iter().map(|r| r.0).collect();
                'scan: loop {
                    let b = grid.linear(&ib);
                    let canonical = a < b || (a == b && t.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0));
                    if canonical && coloring.color(b) == color {
                        let cb = grid.center(&ib);
                        let center_dist = cb.iter().zip(&q).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
                        if (center_dist - d).abs() <= slack {
                            let iv: DistanceInterval = cell_distance_interval(grid, &ia, &ib, t);
                            if iv.contains(d) {
                                found.push(Violation {
                                    cell_a: ia.clone(),
                                    cell_b: ib.clone(),
                                    translate: t.clone(),
                                    color,
                                    distance: d,
                                    interval: [iv.lower, iv.upper],
                                });
                            }
                        }
                    }
                    let mut axis = dim;
                    loop {
                        if axis == 0 {
                            break 'scan;
                        }
                        axis -= 1;
                        if ib[axis] < ranges[axis].1 {
                            ib[axis] += 1;
                            for x in axis + 1..dim {
                                ib[x] = ranges[x].0;
                            }
                            break;
                        }
                    }
                }
            }
            found.into_iter()
        })
        .collect();

    let bonus_cells = coloring.bonus_count();
    VerificationReport {
        certified: violations.is_empty(),
        violations,
        bonus_cells,
        cell_count: grid.cell_count(),
        bonus_fraction: coloring.bonus_fraction(),
    }
}
