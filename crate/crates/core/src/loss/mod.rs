//! Monte Carlo estimators of the probabilistic conflict losses.
//!
//! Every estimator draws `batch_centers` points uniformly from the box
//! `[-R, R]^n` and `batch_peripherals` constraint partners per center, and
//! returns the sample mean of the collision probability together with its
//! exact gradient. Centers are processed in fixed-size chunks, each with its
//! own child stream, and chunk results are summed in order.

pub(crate) mod batch;
mod spec;

use rayon::prelude::*;

pub use spec::{DistanceSpec, LossSpec, Variant, MAX_BATCH};

use crate::error::{Error, Result};
use crate::net::ColoringFunction;
use crate::stream::Stream;
use batch::{chunks, DistSource, PairLayout, TriangleLayout};

/// One loss estimate.
#[derive(Clone, Debug)]
pub struct LossEstimate {
    pub value: f64,
    /// Gradient w.r.t. network parameters; empty for analytic colorings.
    pub parameter_gradient: Vec<f64>,
    /// Gradient w.r.t. each ranged distance, as if every center used the
    /// same value. Empty for analytic colorings and the triangle variant.
    pub distance_gradient: Vec<f64>,
    pub samples_used: usize,
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Default)]
pub(crate) struct Sum {
    total: f64,
    carry: f64,
}

impl Sum {
    #[inline]
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.total + v;
        if self.total.abs() >= v.abs() {
            self.carry += (self.total - t) + v;
        } else {
            self.carry += (v - t) + self.total;
        }
        self.total = t;
    }

    pub(crate) fn value(self) -> f64 {
        self.total + self.carry
    }
}

#[derive(Default)]
struct ChunkResult {
    value: f64,
    bonus: f64,
    grad: Vec<f64>,
    dgrad: Vec<f64>,
}

fn add_into(acc: &mut Vec<f64>, v: &[f64]) {
    if acc.is_empty() {
        acc.extend_from_slice(v);
    } else {
        acc.iter_mut().zip(v).for_each(|(a, b)| *a += b);
    }
}

fn reduce(parts: Vec<ChunkResult>) -> ChunkResult {
    let mut total = ChunkResult::default();
    let (mut value, mut bonus) = (Sum::default(), Sum::default());
    for p in parts {
        value.add(p.value);
        bonus.add(p.bonus);
        add_into(&mut total.grad, &p.grad);
        add_into(&mut total.dgrad, &p.dgrad);
    }
    total.value = value.value();
    total.bonus = bonus.value();
    total
}

fn expect_variant(spec: &LossSpec, want: Variant) -> Result<()> {
    if spec.variant != want {
        return Err(Error::VariantMismatch(format!(
            "expected a {want} spec, got {}",
            spec.variant
        )));
    }
    Ok(())
}

/// Unit-distance loss `E[p(x) . p(y)]`, `|x - y| = 1`, over the first `c`
/// components.
pub fn estimate_unit_loss(coloring: &dyn ColoringFunction, spec: &LossSpec, stream: &Stream) -> Result<LossEstimate> {
    expect_variant(spec, Variant::Unit)?;
    pair_loss(coloring, spec, stream)
}

/// Off-diagonal loss `sum_k E[p(x)_k p(y_k)_k]`, `|x - y_k| = d_k`.
pub fn estimate_offdiag_loss(
    coloring: &dyn ColoringFunction,
    spec: &LossSpec,
    stream: &Stream,
) -> Result<LossEstimate> {
    expect_variant(spec, Variant::OffDiagonal)?;
    pair_loss(coloring, spec, stream)
}

/// Unit loss over the first `c` components plus `lambda` times the mean
/// bonus probability.
pub fn estimate_lagrangian_loss(
    coloring: &dyn ColoringFunction,
    spec: &LossSpec,
    stream: &Stream,
) -> Result<LossEstimate> {
    expect_variant(spec, Variant::Lagrangian)?;
    pair_loss(coloring, spec, stream)
}

/// Triangle loss `E[sum_k p(x)_k p(y)_k (p(z1)_k + p(z2)_k) / 2]`.
pub fn estimate_triangle_loss(
    coloring: &dyn ColoringFunction,
    spec: &LossSpec,
    stream: &Stream,
) -> Result<LossEstimate> {
    expect_variant(spec, Variant::Triangle)?;
    triangle_loss(coloring, spec, stream)
}

/// Dispatches on `spec.variant`.
pub fn estimate_loss(coloring: &dyn ColoringFunction, spec: &LossSpec, stream: &Stream) -> Result<LossEstimate> {
    match spec.variant {
        Variant::Triangle => triangle_loss(coloring, spec, stream),
        _ => pair_loss(coloring, spec, stream),
    }
}

fn pair_loss(coloring: &dyn ColoringFunction, spec: &LossSpec, stream: &Stream) -> Result<LossEstimate> {
    spec.validate()?;
    spec.check_coloring(coloring)?;
    let layout = PairLayout::new(spec)?;
    let (n, m, c) = (spec.batch_centers, spec.batch_peripherals, spec.num_colors);
    let a = coloring.num_outputs();
    let lagrangian = spec.variant == Variant::Lagrangian;
    let lambda = if lagrangian { spec.lagrange_lambda } else { 0.0 };
    let pair_scale = 1.0 / (n * m) as f64;
    let net = coloring.as_network();

    let parts: Vec<ChunkResult> = chunks(n)
        .into_par_iter()
        .map(|(ci, _, count)| -> Result<ChunkResult> {
            let chunk = layout.draw(stream.child(ci), count);
            let (probs, tape) = match net {
                Some(net) => {
                    let (p, t) = net.evaluate_with_tape(&chunk.inputs)?;
                    (p, Some(t))
                }
                None => (coloring.evaluate(&chunk.inputs)?, None),
            };
            let mut value = Sum::default();
            let mut cot = if tape.is_some() {
                vec![0.0; probs.len()]
            } else {
                Vec::new()
            };
            for (g, group) in layout.groups.iter().enumerate() {
                for i in 0..count {
                    let px = &probs[i * a..(i + 1) * a];
                    for j in 0..m {
                        let r = layout.y_row(count, g, i, j);
                        let py = &probs[r * a..(r + 1) * a];
                        let mut dot = 0.0;
                        for &k in &group.colors {
                            dot += px[k] * py[k];
                        }
                        value.add(dot);
                        if !cot.is_empty() {
                            for &k in &group.colors {
                                cot[i * a + k] += pair_scale * py[k];
                                cot[r * a + k] = pair_scale * px[k];
                            }
                        }
                    }
                }
            }
            let value = value.value();
            let mut bonus = Sum::default();
            if lagrangian {
                (0..count).for_each(|i| bonus.add(probs[i * a + c]));
            }
            let bonus = bonus.value();
            let Some(tape) = tape else {
                return Ok(ChunkResult {
                    value,
                    bonus,
                    ..Default::default()
                });
            };
            let net = net.expect("tape implies network");
            if lagrangian {
                for i in 0..count {
                    cot[i * a + c] += lambda / n as f64;
                }
            }
            let g = net.backward(&tape, &cot)?;
            let (dim, w) = (layout.dim, layout.width);
            let mut dgrad = vec![0.0; layout.slots.len()];
            for row in g.inputs.chunks(w) {
                for (s, acc) in dgrad.iter_mut().enumerate() {
                    *acc += row[dim + s];
                }
            }
            for (gi, group) in layout.groups.iter().enumerate() {
                if let DistSource::Slot(s) = group.dist {
                    for i in 0..count {
                        for j in 0..m {
                            let r = layout.y_row(count, gi, i, j);
                            let u = &chunk.dirs[(i * m + j) * dim..(i * m + j + 1) * dim];
                            dgrad[s] += (0..dim).map(|d| g.inputs[r * w + d] * u[d]).sum::<f64>();
                        }
                    }
                }
            }
            Ok(ChunkResult {
                value,
                bonus,
                grad: g.parameters,
                dgrad,
            })
        })
        .collect::<Result<_>>()?;

    let total = reduce(parts);
    let mut value = total.value / (n * m) as f64;
    if lagrangian {
        value += lambda * (total.bonus / n as f64);
    }
    Ok(LossEstimate {
        value,
        parameter_gradient: total.grad,
        distance_gradient: total.dgrad,
        samples_used: n * m * layout.groups.len(),
    })
}

fn triangle_loss(coloring: &dyn ColoringFunction, spec: &LossSpec, stream: &Stream) -> Result<LossEstimate> {
    expect_variant(spec, Variant::Triangle)?;
    spec.validate()?;
    spec.check_coloring(coloring)?;
    let layout = TriangleLayout::new(spec)?;
    let (n, m, c) = (spec.batch_centers, spec.batch_peripherals, spec.num_colors);
    let a = coloring.num_outputs();
    let scale = 1.0 / (n * m) as f64;
    let net = coloring.as_network();

    let parts: Vec<ChunkResult> = chunks(n)
        .into_par_iter()
        .map(|(ci, _, count)| -> Result<ChunkResult> {
            let chunk = layout.draw(stream.child(ci), count);
            let (probs, tape) = match net {
                Some(net) => {
                    let (p, t) = net.evaluate_with_tape(&chunk.inputs)?;
                    (p, Some(t))
                }
                None => (coloring.evaluate(&chunk.inputs)?, None),
            };
            let mut value = Sum::default();
            let mut cot = if tape.is_some() {
                vec![0.0; probs.len()]
            } else {
                Vec::new()
            };
            for i in 0..count {
                for j in 0..m {
                    let [ry, r1, r2] = layout.rows_of(count, i, j);
                    let mut term = 0.0;
                    for k in 0..c {
                        let (px, py) = (probs[i * a + k], probs[ry * a + k]);
                        let (p1, p2) = (probs[r1 * a + k], probs[r2 * a + k]);
                        let zbar = 0.5 * (p1 + p2);
                        term += px * py * zbar;
                        if !cot.is_empty() {
                            cot[i * a + k] += scale * py * zbar;
                            cot[ry * a + k] = scale * px * zbar;
                            cot[r1 * a + k] = scale * 0.5 * px * py;
                            cot[r2 * a + k] = scale * 0.5 * px * py;
                        }
                    }
                    value.add(term);
                }
            }
            let value = value.value();
            let Some(tape) = tape else {
                return Ok(ChunkResult {
                    value,
                    ..Default::default()
                });
            };
            let g = net.expect("tape implies network").backward(&tape, &cot)?;
            Ok(ChunkResult {
                value,
                grad: g.parameters,
                ..Default::default()
            })
        })
        .collect::<Result<_>>()?;

    let total = reduce(parts);
    Ok(LossEstimate {
        value: total.value / (n * m) as f64,
        parameter_gradient: total.grad,
        distance_gradient: Vec::new(),
        samples_used: n * m * 2,
    })
}
