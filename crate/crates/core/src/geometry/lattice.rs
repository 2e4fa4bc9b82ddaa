use std::f64::consts::PI;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Admissible angle window between the two basis vectors of a planar lattice.
pub const MIN_LATTICE_ANGLE: f64 = PI / 6.0;
pub const MAX_LATTICE_ANGLE: f64 = 5.0 * PI / 6.0;

/// Fractional coordinates are snapped to multiples of this quantum after
/// wrapping, so that `x` and `x + v` wrap to bit-identical coordinates.
pub const WRAP_QUANTUM: f64 = 1.0 / (1u64 << 24) as f64;

/// A full-rank lattice in 2 or 3 dimensions spanned by `v_1..v_n`.
///
/// `M = [v_1 ... v_n]` holds the vectors as columns; fractional coordinates
/// `f` of a point `x` satisfy `x = M f`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    dim: usize,
    /// Row `i` is `v_i`.
    vectors: Vec<f64>,
    /// `M^{-1}`, row-major.
    inverse: Vec<f64>,
    det: f64,
}

impl Lattice {
    /// Builds a lattice, rejecting singular bases and (in 2D) bases whose
    /// angle falls outside `[pi/6, 5pi/6]`.
    pub fn new(vectors: &[Vec<f64>]) -> Result<Self> {
        let lattice = Self::new_unchecked_angle(vectors)?;
        if lattice.dim == 2 {
            let angle = lattice.angle(0, 1);
            if !(MIN_LATTICE_ANGLE - 1e-12..=MAX_LATTICE_ANGLE + 1e-12).contains(&angle) {
                return Err(Error::LatticeAngle {
                    angle_deg: angle.to_degrees(),
                });
            }
        }
        Ok(lattice)
    }

    /// Builds a lattice checking only that the basis is invertible.
    pub fn new_unchecked_angle(vectors: &[Vec<f64>]) -> Result<Self> {
        let dim = vectors.len();
        if !(2..=3).contains(&dim) {
            return Err(Error::invalid(format!("lattice must be 2D or 3D, got {dim} vectors")));
        }
        for v in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: v.len(),
                });
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid("lattice vector has non-finite entries"));
            }
        }
        let flat: Vec<f64> = vectors.iter().flatten().copied().collect();
        // m[r][c] = v_c[r]
        let m = |r: usize, c: usize| flat[c * dim + r];
        let (det, inverse) = if dim == 2 {
            let det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
            let inv = vec![m(1, 1) / det, -m(0, 1) / det, -m(1, 0) / det, m(0, 0) / det];
            (det, inv)
        } else {
            let cof = |r: usize, c: usize| {
                let rows: Vec<usize> = (0..3).filter(|&i| i != r).collect();
                let cols: Vec<usize> = (0..3).filter(|&i| i != c).collect();
                let minor = m(rows[0], cols[0]) * m(rows[1], cols[1]) - m(rows[0], cols[1]) * m(rows[1], cols[0]);
                if (r + c).is_multiple_of(2) {
                    minor
                } else {
                    -minor
                }
            };
            let det = (0..3).map(|c| m(0, c) * cof(0, c)).sum::<f64>();
            let mut inv = vec![0.0; 9];
            for r in 0..3 {
                for c in 0..3 {
                    // inverse = adjugate / det, adjugate = cofactor^T
                    inv[r * 3 + c] = cof(c, r) / det;
                }
            }
            (det, inv)
        };
        if !(det.abs() > 1e-12) {
            return Err(Error::SingularLattice { det });
        }
        Ok(Lattice {
            dim,
            vectors: flat,
            inverse,
            det,
        })
    }

    /// Square (2D) or cubic (3D) lattice with the given spacing.
    pub fn cubic(dim: usize, spacing: f64) -> Result<Self> {
        let vectors: Vec<Vec<f64>> = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { spacing } else { 0.0 }).collect())
            .collect();
        Self::new(&vectors)
    }

    /// Planar lattice of two vectors of length `spacing` at 60 degrees.
    pub fn hexagonal(spacing: f64) -> Result<Self> {
        Self::new(&[vec![spacing, 0.0], vec![0.5 * spacing, 0.5 * 3f64.sqrt() * spacing]])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vectors(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| self.vector(i).to_vec()).collect()
    }

    /// Flat row-major vectors (`v_1` first).
    pub fn flat_vectors(&self) -> &[f64] {
        &self.vectors
    }

    /// Row-major `M^{-1}`.
    pub fn inverse(&self) -> &[f64] {
        &self.inverse
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    /// Volume (area in 2D) of the fundamental domain.
    pub fn cell_volume(&self) -> f64 {
        self.det.abs()
    }

    /// Angle between `v_i` and `v_j` in radians.
    pub fn angle(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.vector(i), self.vector(j));
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        (dot / (norm(a) * norm(b))).clamp(-1.0, 1.0).acos()
    }

    /// `M^{-1} x`.
    pub fn to_fractional(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|r| (0..n).map(|c| self.inverse[r * n + c] * x[c]).sum())
            .collect()
    }

    /// `M f`.
    pub fn to_cartesian(&self, f: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|r| (0..n).map(|c| self.vectors[c * n + r] * f[c]).sum())
            .collect()
    }

    /// Lattice vector `sum_i coeffs[i] v_i`.
    pub fn combination(&self, coeffs: &[i64]) -> Vec<f64> {
        let f: Vec<f64> = coeffs.iter().map(|&c| c as f64).collect();
        self.to_cartesian(&f)
    }

    /// Diameter of the closed fundamental parallelotope.
    pub fn diameter(&self) -> f64 {
        let edges = self.vectors();
        parallelotope_diameter(&edges)
    }

    /// Fractional coordinates of `x` reduced into `[0, 1)^n`.
    pub fn wrap(&self, x: &[f64]) -> Vec<f64> {
        let mut f = self.to_fractional(x);
        for v in &mut f {
            *v = wrap_unit(*v);
        }
        f
    }

    pub(crate) fn wrap_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim;
        for (r, o) in out[..n].iter_mut().enumerate() {
            let v: f64 = (0..n).map(|c| self.inverse[r * n + c] * x[c]).sum();
            *o = wrap_unit(v);
        }
    }
}

fn wrap_unit(v: f64) -> f64 {
    let q = (v / WRAP_QUANTUM).round() * WRAP_QUANTUM;
    let w = q - q.floor();
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest distance between two vertices of `{sum a_i e_i : a in [0,1]^n}`.
pub(crate) fn parallelotope_diameter(edges: &[Vec<f64>]) -> f64 {
    let n = edges.len();
    let dim = edges[0].len();
    let mut best: f64 = 0.0;
    for mask in 0..(1usize << n) {
        let mut v = vec![0.0; dim];
        for (i, e) in edges.iter().enumerate() {
            let s = if mask >> i & 1 == 1 { 1.0 } else { -1.0 };
            for (vk, ek) in v.iter_mut().zip(e) {
                *vk += s * ek;
            }
        }
        best = best.max(norm(&v));
    }
    best
}

/// Wraps a point into fractional coordinates in `[0, 1)^n`.
///
/// `wrap_periodic(x + t, L) == wrap_periodic(x, L)` for lattice vectors `t`
/// (bit-identical outside a negligible set near quantization midpoints).
pub fn wrap_periodic(point: &[f64], lattice: &Lattice) -> Result<Vec<f64>> {
    if point.len() != lattice.dim() {
        return Err(Error::DimensionMismatch {
            expected: lattice.dim(),
            actual: point.len(),
        });
    }
    Ok(lattice.wrap(point))
}

#[derive(Serialize, Deserialize)]
struct LatticeRepr {
    vectors: Vec<f64>,
}

impl Serialize for Lattice {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LatticeRepr {
            vectors: self.vectors.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Lattice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = LatticeRepr::deserialize(d)?;
        let dim = match repr.vectors.len() {
            4 => 2,
            9 => 3,
            n => {
                return Err(serde::de::Error::custom(format!(
                    "lattice needs 4 or 9 entries, got {n}"
                )))
            }
        };
        let vectors: Vec<Vec<f64>> = repr.vectors.chunks(dim).map(|c| c.to_vec()).collect();
        Lattice::new_unchecked_angle(&vectors).map_err(serde::de::Error::custom)
    }
}
