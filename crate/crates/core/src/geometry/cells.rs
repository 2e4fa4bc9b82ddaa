//! Cell geometry for discretized fundamental domains.
//!
//! Every cell of a grid is a translate of the same parallelotope spanned by
//! `v_i / k_i`, so the Minkowski difference `A - (B + t)` of two cells is the
//! zonotope `c + sum g_i e_i` with `g` in `[-1, 1]^n`. Distance bounds reduce
//! to the norm range of that zonotope.

use crate::error::{Error, Result};
use crate::geometry::lattice::{norm, parallelotope_diameter, Lattice};

/// Outward padding applied to every distance interval.
pub const INTERVAL_PADDING: f64 = 1e-9;

/// Conservative bounds on `{|p - q| : p in A, q in B}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceInterval {
    pub lower: f64,
    pub upper: f64,
}

impl DistanceInterval {
    pub fn contains(&self, d: f64) -> bool {
        self.lower <= d && d <= self.upper
    }

    fn padded(min: f64, max: f64) -> Self {
        DistanceInterval {
            lower: (min - INTERVAL_PADDING).max(0.0),
            upper: max + INTERVAL_PADDING,
        }
    }
}

/// Exact `(min, max)` of `|c + sum_i g_i e_i|` over `g in [-1, 1]^n`.
///
/// The minimum is found by enumerating all `3^n` faces (each coordinate
/// free, `-1` or `+1`) and solving the least-squares problem on each face's
/// affine hull; the true minimizer is interior to some face and therefore
/// feasible there.
pub(crate) fn zonotope_norm_range(center: &[f64], edges: &[&[f64]]) -> (f64, f64) {
    let n = edges.len();
    let dim = center.len();
    let mut max: f64 = 0.0;
    for mask in 0..(1usize << n) {
        let mut v = center.to_vec();
        for (i, e) in edges.iter().enumerate() {
            let s = if mask >> i & 1 == 1 { 1.0 } else { -1.0 };
            for k in 0..dim {
                v[k] += s * e[k];
            }
        }
        max = max.max(norm(&v));
    }

    let mut min = f64::INFINITY;
    let faces = 3usize.pow(n as u32);
    let mut free = [0usize; 3];
    for face in 0..faces {
        let mut code = face;
        let mut shifted = center.to_vec();
        let mut nfree = 0;
        for (i, e) in edges.iter().enumerate() {
            match code % 3 {
                0 => {
                    free[nfree] = i;
                    nfree += 1;
                }
                c => {
                    let s = if c == 1 { 1.0 } else { -1.0 };
                    for k in 0..dim {
                        shifted[k] += s * e[k];
                    }
                }
            }
            code /= 3;
        }
        if nfree == 0 {
            min = min.min(norm(&shifted));
            continue;
        }
        // normal equations G g = -E^T c on the free coordinates
        let mut g = [[0.0f64; 3]; 3];
        let mut rhs = [0.0f64; 3];
        for a in 0..nfree {
            let ea = edges[free[a]];
            for b in 0..nfree {
                g[a][b] = dot(ea, edges[free[b]]);
            }
            rhs[a] = -dot(ea, &shifted);
        }
        let Some(sol) = solve_small(&g, &rhs, nfree) else {
            continue;
        };
        if sol[..nfree].iter().all(|x| x.abs() <= 1.0 + 1e-12) {
            let mut v = shifted.clone();
            for a in 0..nfree {
                let e = edges[free[a]];
                let coef = sol[a].clamp(-1.0, 1.0);
                for k in 0..dim {
                    v[k] += coef * e[k];
                }
            }
            min = min.min(norm(&v));
        }
    }
    (min, max)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting on an `n x n` system, `n <= 3`.
fn solve_small(g: &[[f64; 3]; 3], rhs: &[f64; 3], n: usize) -> Option<[f64; 3]> {
    let mut a = *g;
    let mut b = *rhs;
    let scale = (0..n).map(|i| a[i][i].abs()).fold(0.0, f64::max);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-14 * scale.max(1e-300) {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            let pivot_row = a[col];
            for (arc, pc) in a[r][col..n].iter_mut().zip(&pivot_row[col..n]) {
                *arc -= f * pc;
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// A fundamental domain subdivided into `k_1 x ... x k_n` congruent cells.
#[derive(Clone, Debug, PartialEq)]
pub struct CellGrid {
    lattice: Lattice,
    resolution: Vec<usize>,
    edges: Vec<Vec<f64>>,
    diameter: f64,
}

impl CellGrid {
    pub fn new(lattice: Lattice, resolution: &[usize]) -> Result<Self> {
        if resolution.len() != lattice.dim() {
            return Err(Error::DimensionMismatch {
                expected: lattice.dim(),
                actual: resolution.len(),
            });
        }
        if resolution.contains(&0) {
            return Err(Error::invalid("grid resolution must be at least 1 per axis"));
        }
        let edges: Vec<Vec<f64>> = (0..lattice.dim())
            .map(|i| lattice.vector(i).iter().map(|v| v / resolution[i] as f64).collect())
            .collect();
        let diameter = parallelotope_diameter(&edges);
        Ok(CellGrid {
            lattice,
            resolution: resolution.to_vec(),
            edges,
            diameter,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn dim(&self) -> usize {
        self.resolution.len()
    }

    pub fn cell_count(&self) -> usize {
        self.resolution.iter().product()
    }

    /// Edge vectors `v_i / k_i` of every cell.
    pub fn cell_edges(&self) -> &[Vec<f64>] {
        &self.edges
    }

    /// Diameter of a single cell (the longest diagonal).
    pub fn cell_diameter(&self) -> f64 {
        self.diameter
    }

    /// Row-major linear index of a cell.
    pub fn linear(&self, index: &[usize]) -> usize {
        index.iter().zip(&self.resolution).fold(0, |acc, (&i, &k)| acc * k + i)
    }

    pub fn unlinear(&self, mut linear: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = linear % self.resolution[a];
            linear /= self.resolution[a];
        }
        idx
    }

    /// Cell center in lattice (fractional) coordinates.
    pub fn center_fractional(&self, index: &[usize]) -> Vec<f64> {
        index
            .iter()
            .zip(&self.resolution)
            .map(|(&i, &k)| (i as f64 + 0.5) / k as f64)
            .collect()
    }

    /// Cell center in the plane (or space).
    pub fn center(&self, index: &[usize]) -> Vec<f64> {
        self.lattice.to_cartesian(&self.center_fractional(index))
    }

    /// Cell containing the point, after reduction modulo the lattice.
    pub fn locate(&self, point: &[f64]) -> usize {
        let f = self.lattice.wrap(point);
        let idx: Vec<usize> = f
            .iter()
            .zip(&self.resolution)
            .map(|(&x, &k)| ((x * k as f64).floor() as usize).min(k - 1))
            .collect();
        self.linear(&idx)
    }

    /// Distance interval between two cells `offset` fine-grid steps apart
    /// (cell `B` sits at `A + sum offset_i e_i`).
    pub fn offset_interval(&self, offset: &[i64]) -> DistanceInterval {
        let dim = self.dim();
        let mut c = vec![0.0; dim];
        for (i, &o) in offset.iter().enumerate() {
            for (ck, ek) in c.iter_mut().zip(&self.edges[i]) {
                *ck -= o as f64 * ek;
            }
        }
        let edges: Vec<&[f64]> = self.edges.iter().map(|e| e.as_slice()).collect();
        let (min, max) = zonotope_norm_range(&c, &edges);
        DistanceInterval::padded(min, max)
    }

    /// Fine-grid offset from cell `a` to cell `b + translate`.
    pub fn fine_offset(&self, a: &[usize], b: &[usize], translate: &[i64]) -> Vec<i64> {
        (0..self.dim())
            .map(|i| b[i] as i64 + translate[i] * self.resolution[i] as i64 - a[i] as i64)
            .collect()
    }
}

/// Conservative distance bounds between cell `a` and the translate of cell
/// `b` by the lattice vector with integer coefficients `translate`.
pub fn cell_distance_interval(grid: &CellGrid, a: &[usize], b: &[usize], translate: &[i64]) -> DistanceInterval {
    grid.offset_interval(&grid.fine_offset(a, b, translate))
}

/// Distance between the closed fundamental domain `P` and `P + t`.
pub fn domain_gap(lattice: &Lattice, coeffs: &[i64]) -> f64 {
    let t = lattice.combination(coeffs);
    let c: Vec<f64> = t.iter().map(|v| -v).collect();
    let edges = lattice.vectors();
    let refs: Vec<&[f64]> = edges.iter().map(|e| e.as_slice()).collect();
    zonotope_norm_range(&c, &refs).0
}

/// Every lattice translate `t` (as integer coefficients) with
/// `dist(P, P + t) <= reach`, in lexicographic order. Includes zero.
pub fn lattice_translates(lattice: &Lattice, reach: f64) -> Vec<Vec<i64>> {
    let dim = lattice.dim();
    // |t| <= reach + diam(P), and |n_i| <= |row_i(M^-1)| |t|
    let radius = reach.max(0.0) + lattice.diameter() + 1e-9;
    let inv = lattice.inverse();
    let bounds: Vec<i64> = (0..dim)
        .map(|r| {
            let row = norm(&inv[r * dim..(r + 1) * dim]);
            (row * radius).ceil() as i64
        })
        .collect();
    let mut out = Vec::new();
    let mut n = bounds.iter().map(|b| -b).collect::<Vec<_>>();
    loop {
        if domain_gap(lattice, &n) <= reach + INTERVAL_PADDING {
            out.push(n.clone());
        }
        // odometer increment
        let mut axis = dim;
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            if n[axis] < bounds[axis] {
                n[axis] += 1;
                for (m, b) in n[axis + 1..].iter_mut().zip(&bounds[axis + 1..]) {
                    *m = -b;
                }
                break;
            }
        }
    }
}
