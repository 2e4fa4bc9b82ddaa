//! Sample layouts shared by the estimators and the argmax conflict rate.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::spec::{DistanceSpec, LossSpec, Variant};
use crate::error::Result;
use crate::geometry::sampling::DirectionSampler;
use crate::geometry::triangle::third_points_unchecked;
use crate::stream::Stream;

/// Centers per work unit. Fixed so results do not depend on the worker count.
pub(crate) const CHUNK: usize = 256;

/// `(chunk index, first center, center count)` for `n` centers.
pub(crate) fn chunks(n: usize) -> Vec<(u64, usize, usize)> {
    (0..n.div_ceil(CHUNK))
        .map(|c| (c as u64, c * CHUNK, CHUNK.min(n - c * CHUNK)))
        .collect()
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum DistSource {
    Fixed(f64),
    Slot(usize),
}

/// Colors whose peripheral points share one distance.
#[derive(Clone, Debug)]
pub(crate) struct Group {
    pub colors: Vec<usize>,
    pub dist: DistSource,
}

fn draw_slot(range: [f64; 2], rng: &mut ChaCha8Rng) -> f64 {
    if range[0] == range[1] {
        range[0]
    } else {
        rng.random_range(range[0]..range[1])
    }
}

/// Pair sampling: `x` in the box, `y = x + d_g u` for every group `g`, with
/// the `m` directions `u` of a center shared by all groups.
pub(crate) struct PairLayout {
    pub dim: usize,
    pub width: usize,
    pub m: usize,
    pub radius: f64,
    pub slots: Vec<[f64; 2]>,
    pub groups: Vec<Group>,
    /// Group of each regular color.
    pub color_group: Vec<usize>,
    sampler: DirectionSampler,
}

pub(crate) struct PairChunk {
    pub inputs: Vec<f64>,
    /// `count * m` directions.
    pub dirs: Vec<f64>,
}

impl PairLayout {
    pub fn new(spec: &LossSpec) -> Result<Self> {
        let mut groups: Vec<Group> = Vec::new();
        let mut color_group = Vec::with_capacity(spec.num_colors);
        let mut slots = Vec::new();
        for (k, d) in spec.color_distances().into_iter().enumerate() {
            match d {
                DistanceSpec::Fixed(v) => {
                    let existing = groups
                        .iter()
                        .position(|g| matches!(g.dist, DistSource::Fixed(w) if w.to_bits() == v.to_bits()));
                    match existing {
                        Some(g) => {
                            groups[g].colors.push(k);
                            color_group.push(g);
                        }
                        None => {
                            color_group.push(groups.len());
                            groups.push(Group {
                                colors: vec![k],
                                dist: DistSource::Fixed(v),
                            });
                        }
                    }
                }
                DistanceSpec::Range(r) => {
                    color_group.push(groups.len());
                    groups.push(Group {
                        colors: vec![k],
                        dist: DistSource::Slot(slots.len()),
                    });
                    slots.push(r);
                }
            }
        }
        Ok(PairLayout {
            dim: spec.dimension,
            width: spec.dimension + slots.len(),
            m: spec.batch_peripherals,
            radius: spec.box_radius,
            slots,
            groups,
            color_group,
            sampler: DirectionSampler::new(spec.dimension, spec.p_norm)?,
        })
    }

    #[inline]
    pub fn y_row(&self, count: usize, g: usize, i: usize, j: usize) -> usize {
        count + (g * count + i) * self.m + j
    }

    pub fn rows(&self, count: usize) -> usize {
        count * (1 + self.groups.len() * self.m)
    }

    pub fn draw(&self, stream: Stream, count: usize) -> PairChunk {
        let mut rng = stream.rng();
        let (dim, w, m) = (self.dim, self.width, self.m);
        let mut inputs = vec![0.0; self.rows(count) * w];
        let mut dirs = vec![0.0; count * m * dim];
        for i in 0..count {
            let row = &mut inputs[i * w..(i + 1) * w];
            for v in &mut row[..dim] {
                *v = rng.random_range(-self.radius..self.radius);
            }
            for (s, r) in self.slots.iter().enumerate() {
                row[dim + s] = draw_slot(*r, &mut rng);
            }
            for j in 0..m {
                self.sampler
                    .sample(&mut rng, &mut dirs[(i * m + j) * dim..(i * m + j + 1) * dim]);
            }
        }
        for i in 0..count {
            let (head, tail) = inputs.split_at_mut(count * w);
            let x = &head[i * w..(i + 1) * w];
            for (g, group) in self.groups.iter().enumerate() {
                let d = match group.dist {
                    DistSource::Fixed(d) => d,
                    DistSource::Slot(s) => x[dim + s],
                };
                for j in 0..m {
                    let r = self.y_row(count, g, i, j) - count;
                    let y = &mut tail[r * w..(r + 1) * w];
                    let u = &dirs[(i * m + j) * dim..(i * m + j + 1) * dim];
                    for c in 0..dim {
                        y[c] = x[c] + d * u[c];
                    }
                    y[dim..].copy_from_slice(&x[dim..]);
                }
            }
        }
        PairChunk { inputs, dirs }
    }
}

/// Triangle sampling: `x` in the box, `y = x + u`, and the two apexes with
/// `|x - z| = a`, `|y - z| = b`.
pub(crate) struct TriangleLayout {
    pub width: usize,
    pub m: usize,
    radius: f64,
    sides: [DistanceSpec; 2],
    sampler: DirectionSampler,
}

pub(crate) struct TriangleChunk {
    pub inputs: Vec<f64>,
}

impl TriangleLayout {
    pub fn new(spec: &LossSpec) -> Result<Self> {
        debug_assert_eq!(spec.variant, Variant::Triangle);
        let slots = spec.triangle_sides.iter().filter(|s| s.is_ranged()).count();
        Ok(TriangleLayout {
            width: 2 + slots,
            m: spec.batch_peripherals,
            radius: spec.box_radius,
            sides: spec.triangle_sides,
            sampler: DirectionSampler::new(2, 2.0)?,
        })
    }

    /// Rows of `y`, `z1`, `z2` for peripheral `(i, j)`.
    #[inline]
    pub fn rows_of(&self, count: usize, i: usize, j: usize) -> [usize; 3] {
        let r = i * self.m + j;
        let block = count * self.m;
        [count + r, count + block + r, count + 2 * block + r]
    }

    pub fn draw(&self, stream: Stream, count: usize) -> TriangleChunk {
        let mut rng = stream.rng();
        let (w, m) = (self.width, self.m);
        let mut inputs = vec![0.0; count * (1 + 3 * m) * w];
        let mut u = [0.0; 2];
        for i in 0..count {
            let x = [
                rng.random_range(-self.radius..self.radius),
                rng.random_range(-self.radius..self.radius),
            ];
            let mut params = [0.0; 2];
            let mut sides = [0.0; 2];
            let mut s = 0;
            for (t, side) in self.sides.iter().enumerate() {
                sides[t] = match side {
                    DistanceSpec::Fixed(v) => *v,
                    DistanceSpec::Range(r) => {
                        let v = draw_slot(*r, &mut rng);
                        params[s] = v;
                        s += 1;
                        v
                    }
                };
            }
            let put = |inputs: &mut [f64], row: usize, p: [f64; 2]| {
                let dst = &mut inputs[row * w..(row + 1) * w];
                dst[..2].copy_from_slice(&p);
                dst[2..].copy_from_slice(&params[..s]);
            };
            put(&mut inputs, i, x);
            for j in 0..m {
                self.sampler.sample(&mut rng, &mut u);
                let y = [x[0] + u[0], x[1] + u[1]];
                let (z1, z2) = third_points_unchecked(x, u, 1.0, sides[0], sides[1]);
                let [ry, r1, r2] = self.rows_of(count, i, j);
                put(&mut inputs, ry, y);
                put(&mut inputs, r1, z1);
                put(&mut inputs, r2, z2);
            }
        }
        TriangleChunk { inputs }
    }
}
