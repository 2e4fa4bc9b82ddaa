use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::lattice::{MAX_LATTICE_ANGLE, MIN_LATTICE_ANGLE};
use crate::geometry::Lattice;
use crate::net::ColoringFunction;
use crate::stream::Stream;

/// Settings for the radial-line periodicity search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PeriodicityParams {
    pub num_directions: usize,
    pub max_offset: f64,
    pub offset_step: f64,
    /// Largest mean total-variation distance that still counts as a match.
    pub similarity_threshold: f64,
    pub line_samples: usize,
    /// Half-width of the box the lines (and shifted lines) must stay in.
    pub box_radius: f64,
}

impl Default for PeriodicityParams {
    fn default() -> Self {
        PeriodicityParams {
            num_directions: 720,
            max_offset: 4.0,
            offset_step: 0.01,
            similarity_threshold: 0.05,
            line_samples: 512,
            box_radius: 3.0,
        }
    }
}

impl PeriodicityParams {
    fn validate(&self) -> Result<()> {
        if self.num_directions == 0 || self.line_samples < 2 {
            return Err(Error::invalid("need at least one direction and two samples per line"));
        }
        if !(self.offset_step > 0.0 && self.max_offset >= self.offset_step) {
            return Err(Error::invalid("offsets must satisfy 0 < offset_step <= max_offset"));
        }
        if !(self.max_offset < 2.0 * self.box_radius) {
            return Err(Error::invalid(format!(
                "max_offset {} leaves no room for lines inside a box of radius {}",
                self.max_offset, self.box_radius
            )));
        }
        if !(self.similarity_threshold > 0.0 && self.similarity_threshold < 1.0) {
            return Err(Error::invalid("similarity threshold must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// The curve must first climb this far above the threshold before a dip
/// below it counts, so slowly varying colorings do not match at tiny shifts.
const DEPARTURE_FACTOR: f64 = 3.0;

/// Refinements attempted before giving up on finding a basis.
const MAX_REFINEMENTS: usize = 16;

/// Hits closer than this fraction of a refined period's length are taken to
/// be the same period.
const SAME_PERIOD: f64 = 0.25;

fn tv(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

fn directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    if dim == 2 {
        (0..count)
            .map(|i| {
                let t = PI * i as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect()
    } else {
        // Fibonacci points on the upper hemisphere
        let golden = PI * (3.0 - 5f64.sqrt());
        (0..count)
            .map(|i| {
                let z = (i as f64 + 0.5) / count as f64;
                let r = (1.0 - z * z).sqrt();
                let phi = golden * i as f64;
                vec![r * phi.cos(), r * phi.sin(), z]
            })
            .collect()
    }
}

/// A detected period along one direction.
#[derive(Clone, Debug)]
struct Hit {
    vector: Vec<f64>,
    score: f64,
}

/// First period along `u`, if the similarity curve leaves and returns.
fn scan_direction(coloring: &dyn ColoringFunction, u: &[f64], params: &PeriodicityParams) -> Result<Option<Hit>> {
    let r = params.box_radius;
    let line_len = 2.0 * r - params.max_offset;
    let sub = (params.offset_step * params.line_samples as f64 / line_len)
        .ceil()
        .max(1.0) as usize;
    let h = params.offset_step / sub as f64;
    let taus = (params.max_offset / params.offset_step).floor() as usize;
    let span = taus * sub;
    let available = (line_len / h).floor() as usize + 1;
    let total = available + span;
    let dim = u.len();
    let mut inputs = Vec::with_capacity(total * dim);
    for j in 0..total {
        let s = -r + j as f64 * h;
        inputs.extend(u.iter().map(|c| s * c));
    }
    let probs = coloring.evaluate(&inputs)?;
    let a = coloring.num_outputs();
    let samples: Vec<usize> = (0..params.line_samples)
        .map(|i| (i * (available - 1)) / (params.line_samples - 1))
        .collect();
    let row = |j: usize| &probs[j * a..(j + 1) * a];
    let curve: Vec<f64> = (1..=taus)
        .map(|tau| samples.iter().map(|&j| tv(row(j), row(j + tau * sub))).sum::<f64>() / samples.len() as f64)
        .collect();

    let thr = params.similarity_threshold;
    let departure = DEPARTURE_FACTOR * thr;
    let Some(left) = curve.iter().position(|&v| v > departure) else {
        return Ok(None);
    };
    let Some(mut best) = (left..curve.len()).find(|&i| curve[i] < thr) else {
        return Ok(None);
    };
    while best + 1 < curve.len() && curve[best + 1] < curve[best] {
        best += 1;
    }
    let t = (best + 1) as f64 * params.offset_step;
    Ok(Some(Hit {
        vector: u.iter().map(|c| c * t).collect(),
        score: curve[best],
    }))
}

/// Mean total-variation distance between `p(x)` and `p(x + v)` over points
/// with both ends in the box.
struct ShiftObjective {
    points: Vec<Vec<f64>>,
    radius: f64,
}

impl ShiftObjective {
    fn new(dim: usize, radius: f64, count: usize, stream: &Stream) -> Self {
        let mut rng = stream.rng();
        let points = (0..count)
            .map(|_| (0..dim).map(|_| rng.random_range(-radius..radius)).collect())
            .collect();
        ShiftObjective { points, radius }
    }

    fn eval(&self, coloring: &dyn ColoringFunction, v: &[f64]) -> Result<f64> {
        let dim = v.len();
        let mut inputs = Vec::new();
        let mut n = 0;
        for x in &self.points {
            let inside = x.iter().zip(v).all(|(a, b)| (a + b).abs() <= self.radius);
            if inside {
                inputs.extend_from_slice(x);
                inputs.extend(x.iter().zip(v).map(|(a, b)| a + b));
                n += 1;
            }
        }
        if n < self.points.len() / 8 {
            return Ok(f64::INFINITY);
        }
        let p = coloring.evaluate(&inputs)?;
        let a = coloring.num_outputs();
        let _ = dim;
        Ok((0..n)
            .map(|i| tv(&p[2 * i * a..(2 * i + 1) * a], &p[(2 * i + 1) * a..(2 * i + 2) * a]))
            .sum::<f64>()
            / n as f64)
    }

    /// Compass search from `v`, shrinking the step from `step` to `tol`.
    fn refine(&self, coloring: &dyn ColoringFunction, v: &[f64], step: f64, tol: f64) -> Result<(Vec<f64>, f64)> {
        let mut best = v.to_vec();
        let mut value = self.eval(coloring, &best)?;
        let mut h = step;
        while h >= tol {
            let mut improved = false;
            for axis in 0..best.len() {
                for sign in [1.0, -1.0] {
                    let mut trial = best.clone();
                    trial[axis] += sign * h;
                    let f = self.eval(coloring, &trial)?;
                    if f < value {
                        best = trial;
                        value = f;
                        improved = true;
                    }
                }
            }
            if !improved {
                h *= 0.5;
            }
        }
        Ok((best, value))
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn angle(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    (dot / (norm(a) * norm(b))).clamp(-1.0, 1.0).acos()
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Detects a lattice of periods of `coloring` from similarity along radial
/// lines through the origin.
///
/// Each direction contributes its first period (the first local minimum of
/// the similarity curve below the threshold after the curve has departed).
/// Distinct hits are polished by a compass search on a 2D (or 3D) sample of
/// the shift objective; the basis is the shortest vector followed by the
/// shortest vector(s) at an admissible angle whose sums and differences with
/// the earlier basis vectors are periods as well.
pub fn extract_periodicity(coloring: &dyn ColoringFunction, params: &PeriodicityParams) -> Result<Lattice> {
    params.validate()?;
    let dim = coloring.spatial_dim();
    if !(2..=3).contains(&dim) || coloring.param_count() != 0 {
        return Err(Error::invalid(
            "periodicity extraction needs a 2D or 3D coloring without parameter inputs",
        ));
    }
    let dirs = directions(dim, params.num_directions);
    let hits: Vec<Hit> = dirs
        .par_iter()
        .map(|u| scan_direction(coloring, u, params))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    if hits.is_empty() {
        return Err(Error::NoPeriodicityFound(format!(
            "no direction returned below similarity {} within offset {}",
            params.similarity_threshold, params.max_offset
        )));
    }

    // one representative per cluster of nearby vectors, best score first
    let mut sorted = hits;
    sorted.sort_by(|a, b| {
        a.score
            .total_cmp(&b.score)
            .then(norm(&a.vector).total_cmp(&norm(&b.vector)))
    });
    let radius = (5.0 * params.offset_step).max(0.05);
    let mut reps: Vec<Hit> = Vec::new();
    for h in sorted {
        let near = reps.iter().any(|r| {
            let d1 = norm(&r.vector.iter().zip(&h.vector).map(|(a, b)| a - b).collect::<Vec<_>>());
            let d2 = norm(&r.vector.iter().zip(&h.vector).map(|(a, b)| a + b).collect::<Vec<_>>());
            d1.min(d2) < radius
        });
        if !near {
            reps.push(h);
        }
    }
    reps.sort_by(|a, b| norm(&a.vector).total_cmp(&norm(&b.vector)));

    // neighbouring directions report the same period with some angular
    // error, so skip hits close to a period that has already been refined
    let objective = ShiftObjective::new(dim, params.box_radius, 4000, &Stream::new(0x5eed).named("periodicity"));
    let mut refined: Vec<Vec<f64>> = Vec::new();
    let mut attempts = 0;
    for h in &reps {
        if attempts == MAX_REFINEMENTS {
            break;
        }
        let covered = refined.iter().any(|r| {
            let d = norm(&r.iter().zip(&h.vector).map(|(a, b)| a - b).collect::<Vec<_>>())
                .min(norm(&r.iter().zip(&h.vector).map(|(a, b)| a + b).collect::<Vec<_>>()));
            d < SAME_PERIOD * norm(r)
        });
        if covered {
            continue;
        }
        attempts += 1;
        let (v, score) = objective.refine(coloring, &h.vector, params.offset_step, 1e-4)?;
        log::debug!("period candidate {:?} -> {:?} (similarity {score:.4})", h.vector, v);
        if score < params.similarity_threshold {
            refined.push(v);
        }
    }
    refined.sort_by(|a, b| norm(a).total_cmp(&norm(b)));

    // two periods only span a lattice of periods if their sum and
    // difference are periods too; the shorter of the two is checked
    let consistent = |a: &[f64], b: &[f64]| -> Result<bool> {
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        let sum: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        let shorter = if norm(&diff) <= norm(&sum) { diff } else { sum };
        let score = objective.eval(coloring, &shorter)?;
        log::debug!("combination {shorter:?} of {a:?} and {b:?} (similarity {score:.4})");
        Ok(score < params.similarity_threshold)
    };
    let admissible = |a: &[f64], b: &[f64]| (MIN_LATTICE_ANGLE..=MAX_LATTICE_ANGLE).contains(&angle(a, b));
    let none = || Error::NoPeriodicityFound(format!("{} candidate periods but no admissible basis", refined.len()));
    let v1 = refined.first().ok_or_else(none)?.clone();
    let mut v2 = None;
    for v in &refined {
        if admissible(&v1, v) && consistent(&v1, v)? {
            v2 = Some(v.clone());
            break;
        }
    }
    let mut basis = vec![v1, v2.ok_or_else(none)?];
    if dim == 3 {
        let n = cross(&basis[0], &basis[1]);
        let mut v3 = None;
        for v in &refined {
            let s = (v.iter().zip(&n).map(|(a, b)| a * b).sum::<f64>() / (norm(v) * norm(&n))).abs();
            if s >= (PI / 6.0).sin() && consistent(&basis[0], v)? && consistent(&basis[1], v)? {
                v3 = Some(v.clone());
                break;
            }
        }
        basis.push(v3.ok_or_else(none)?);
    }
    Lattice::new(&basis)
}
