use serde::{Deserialize, Serialize};

use super::argmax_conflict_rate;
use super::sweep::{check_trained_range, pin_distances};
use crate::error::{Error, Result};
use crate::loss::{estimate_loss, LossSpec};
use crate::net::Network;
use crate::stream::Stream;

/// Armijo sufficient-decrease constant.
const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 30;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeOptions {
    pub iterations: usize,
    /// Scale each coordinate by a finite-difference curvature estimate.
    pub curvature: bool,
    /// Pairs used for the final argmax conflict rate.
    pub eval_pairs: usize,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            iterations: 50,
            curvature: false,
            eval_pairs: 100_000,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub distances: Vec<f64>,
    pub initial_loss: f64,
    pub loss: f64,
    pub initial_conflict_rate: f64,
    pub conflict_rate: f64,
    pub iterations: usize,
}

struct Objective<'a> {
    network: &'a Network,
    spec: &'a LossSpec,
    stream: Stream,
    ranges: Vec<[f64; 2]>,
}

impl Objective<'_> {
    /// Smooth loss and its gradient at `d`; every call reuses the same samples.
    fn eval(&self, d: &[f64]) -> Result<(f64, Vec<f64>)> {
        let pinned = pin_distances(self.spec, d)?;
        let est = estimate_loss(self.network, &pinned, &self.stream)?;
        if est.distance_gradient.len() == d.len() {
            return Ok((est.value, est.distance_gradient));
        }
        let mut grad = vec![0.0; d.len()];
        for (s, g) in grad.iter_mut().enumerate() {
            let h = 1e-5 * (self.ranges[s][1] - self.ranges[s][0]).max(1e-3);
            let (lo, hi) = (self.clamp(s, d[s] - h), self.clamp(s, d[s] + h));
            if hi <= lo {
                continue;
            }
            let at = |v: f64| -> Result<f64> {
                let mut e = d.to_vec();
                e[s] = v;
                Ok(estimate_loss(self.network, &pin_distances(self.spec, &e)?, &self.stream)?.value)
            };
            *g = (at(hi)? - at(lo)?) / (hi - lo);
        }
        Ok((est.value, grad))
    }

    fn clamp(&self, s: usize, v: f64) -> f64 {
        v.clamp(self.ranges[s][0], self.ranges[s][1])
    }
}

/// Minimizes the smooth loss over the ranged distance inputs with projected
/// gradient descent and a backtracking line search, keeping each distance
/// inside the network's trained range. Every loss evaluation uses the same
/// sample points, so accepted steps never increase the loss; a step that
/// cannot be improved ends the search at the current point.
pub fn optimize_distances(
    network: &Network,
    spec: &LossSpec,
    initial: &[f64],
    options: &OptimizeOptions,
    stream: &Stream,
) -> Result<OptimizeResult> {
    check_trained_range(network, initial)?;
    if options.eval_pairs == 0 {
        return Err(Error::invalid("eval_pairs must be positive"));
    }
    let objective = Objective {
        network,
        spec,
        stream: stream.named("loss"),
        ranges: network.architecture().param_ranges.clone(),
    };
    let mut d = initial.to_vec();
    let (initial_loss, mut grad) = objective.eval(&d)?;
    let mut loss = initial_loss;
    let mut done = 0;
    for it in 0..options.iterations {
        let scale = if options.curvature {
            curvature_scale(&objective, &d, &grad)?
        } else {
            vec![1.0; d.len()]
        };
        let dir: Vec<f64> = grad.iter().zip(&scale).map(|(g, s)| -g * s).collect();
        if dir.iter().all(|&v| v == 0.0) {
            break;
        }
        // first trial step moves the largest coordinate across its whole range
        let mut t = d
            .iter()
            .enumerate()
            .map(|(s, _)| (objective.ranges[s][1] - objective.ranges[s][0]) / dir[s].abs().max(f64::MIN_POSITIVE))
            .fold(f64::INFINITY, f64::min);
        if options.curvature {
            t = t.min(1.0);
        }
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = (0..d.len()).map(|s| objective.clamp(s, d[s] + t * dir[s])).collect();
            let decrease: f64 = grad
                .iter()
                .zip(trial.iter().zip(&d))
                .map(|(g, (a, b))| g * (a - b))
                .sum();
            if trial != d {
                let (l, g) = objective.eval(&trial)?;
                if l <= loss + ARMIJO * decrease && l < loss {
                    accepted = Some((trial, l, g));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((next, l, g)) = accepted else {
            break;
        };
        log::debug!("optimize step {it}: loss {loss:.6e} -> {l:.6e}");
        d = next;
        loss = l;
        grad = g;
        done = it + 1;
    }

    let eval = stream.named("eval");
    let initial_conflict_rate =
        argmax_conflict_rate(network, &pin_distances(spec, initial)?, options.eval_pairs, &eval)?;
    let conflict_rate = if d == initial {
        initial_conflict_rate
    } else {
        argmax_conflict_rate(network, &pin_distances(spec, &d)?, options.eval_pairs, &eval)?
    };
    Ok(OptimizeResult {
        distances: d,
        initial_loss,
        loss,
        initial_conflict_rate,
        conflict_rate,
        iterations: done,
    })
}

/// Inverse positive diagonal curvature per coordinate, or 1 where the
/// estimate is not positive.
fn curvature_scale(objective: &Objective, d: &[f64], grad: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![1.0; d.len()];
    for s in 0..d.len() {
        let span = objective.ranges[s][1] - objective.ranges[s][0];
        let h = 1e-3 * span.max(1e-3);
        let up = objective.clamp(s, d[s] + h);
        let (base, other) = if up > d[s] {
            (d[s], up)
        } else {
            (d[s], objective.clamp(s, d[s] - h))
        };
        if other == base {
            continue;
        }
        let mut e = d.to_vec();
        e[s] = other;
        let (_, g) = objective.eval(&e)?;
        let curv = (g[s] - grad[s]) / (other - base);
        if curv > 0.0 && curv.is_finite() {
            out[s] = 1.0 / curv;
        }
    }
    Ok(out)
}
