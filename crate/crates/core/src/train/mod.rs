//! Adam with a linearly decaying learning rate, and the training loop.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluate::argmax_conflict_rate;
use crate::loss::{estimate_loss, LossSpec};
use crate::net::{save_checkpoint, Network};
use crate::stream::Stream;

fn default_steps() -> usize {
    16384
}
fn default_lr() -> f64 {
    1e-3
}
fn default_beta1() -> f64 {
    0.9
}
fn default_beta2() -> f64 {
    0.999
}
fn default_epsilon() -> f64 {
    1e-8
}
fn default_eval_every() -> usize {
    512
}
fn default_eval_pairs() -> usize {
    20_000
}

/// Optimizer and schedule settings. The objective lives in [`LossSpec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingConfig {
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_lr")]
    pub lr_initial: f64,
    #[serde(default = "default_beta1")]
    pub adam_beta1: f64,
    #[serde(default = "default_beta2")]
    pub adam_beta2: f64,
    #[serde(default = "default_epsilon")]
    pub adam_epsilon: f64,
    /// Steps between checkpoints written by [`train_with_output`]; 0 = none.
    #[serde(default)]
    pub checkpoint_every: usize,
    #[serde(default = "default_eval_every")]
    pub eval_every: usize,
    /// Pairs sampled for each argmax conflict rate in the history.
    #[serde(default = "default_eval_pairs")]
    pub eval_pairs: usize,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            steps: default_steps(),
            lr_initial: default_lr(),
            adam_beta1: default_beta1(),
            adam_beta2: default_beta2(),
            adam_epsilon: default_epsilon(),
            checkpoint_every: 0,
            eval_every: default_eval_every(),
            eval_pairs: default_eval_pairs(),
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::config("steps", "must be at least 1"));
        }
        if !(self.lr_initial > 0.0 && self.lr_initial.is_finite()) {
            return Err(Error::config(
                "lr_initial",
                format!("must be positive, got {}", self.lr_initial),
            ));
        }
        for (name, b) in [("adam_beta1", self.adam_beta1), ("adam_beta2", self.adam_beta2)] {
            if !(0.0..1.0).contains(&b) {
                return Err(Error::config(name, format!("must lie in [0, 1), got {b}")));
            }
        }
        if !(self.adam_epsilon > 0.0) {
            return Err(Error::config("adam_epsilon", "must be positive"));
        }
        if self.eval_every == 0 {
            return Err(Error::config("eval_every", "must be at least 1"));
        }
        if self.eval_pairs == 0 {
            return Err(Error::config("eval_pairs", "must be at least 1"));
        }
        Ok(())
    }
}

/// Learning rate at `step`, decaying linearly from `lr_initial` to zero at
/// `steps`.
pub fn lr_at(step: usize, config: &TrainingConfig) -> Result<f64> {
    if step >= config.steps {
        return Err(Error::invalid(format!(
            "step {step} outside schedule of {} steps",
            config.steps
        )));
    }
    Ok(config.lr_initial * (config.steps - step) as f64 / config.steps as f64)
}

/// Adam moment estimates.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    pub step: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    pub fn new(len: usize, config: &TrainingConfig) -> Self {
        AdamState {
            first: vec![0.0; len],
            second: vec![0.0; len],
            step: 0,
            beta1: config.adam_beta1,
            beta2: config.adam_beta2,
            epsilon: config.adam_epsilon,
        }
    }
}

/// One bias-corrected Adam step, in place.
pub fn adam_update(state: &mut AdamState, params: &mut [f64], grads: &[f64], lr: f64) -> Result<()> {
    if params.len() != grads.len() || state.first.len() != params.len() {
        return Err(Error::Shape(format!(
            "adam: {} parameters, {} gradients, {} moments",
            params.len(),
            grads.len(),
            state.first.len()
        )));
    }
    if let Some(i) = grads.iter().position(|g| !g.is_finite()) {
        return Err(Error::NonFinite {
            step: state.step as usize,
            what: format!("gradient component {i} is {}", grads[i]),
        });
    }
    state.step += 1;
    let t = state.step as i32;
    let c1 = 1.0 - state.beta1.powi(t);
    let c2 = 1.0 - state.beta2.powi(t);
    let (b1, b2) = (state.beta1, state.beta2);
    for (((p, g), m), v) in params
        .iter_mut()
        .zip(grads)
        .zip(&mut state.first)
        .zip(&mut state.second)
    {
        *m = b1 * *m + (1.0 - b1) * g;
        *v = b2 * *v + (1.0 - b2) * g * g;
        *p -= lr * (*m / c1) / ((*v / c2).sqrt() + state.epsilon);
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryRecord {
    pub step: usize,
    pub lr: f64,
    pub loss: f64,
    pub conflict_rate: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingHistory {
    pub records: Vec<HistoryRecord>,
}

impl TrainingHistory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&HistoryRecord> {
        self.records.last()
    }

    /// `step,lr,loss,conflict_rate` with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,lr,loss,conflict_rate\n");
        for r in &self.records {
            let _ = writeln!(out, "{},{},{},{}", r.step, r.lr, r.loss, r.conflict_rate);
        }
        out
    }
}

/// Per-step loss values, kept alongside the sparse history.
#[derive(Clone, Debug, Default)]
pub struct TrainingTrace {
    pub history: TrainingHistory,
    pub losses: Vec<f64>,
}

/// Trains `network` on `spec` for `config.steps` Adam steps.
pub fn train(
    network: Network,
    spec: &LossSpec,
    config: &TrainingConfig,
    stream: &Stream,
) -> Result<(Network, TrainingHistory)> {
    let (net, trace) = train_with_output(network, spec, config, stream, None)?;
    Ok((net, trace.history))
}

/// Like [`train`], additionally writing periodic checkpoints to `out_dir`
/// and dumping the network there if the loss turns non-finite.
pub fn train_with_output(
    mut network: Network,
    spec: &LossSpec,
    config: &TrainingConfig,
    stream: &Stream,
    out_dir: Option<&Path>,
) -> Result<(Network, TrainingTrace)> {
    config.validate()?;
    spec.validate()?;
    spec.check_coloring(&network)?;
    let arch = network.architecture();
    if arch.param_ranges.len() != spec.param_ranges().len() {
        return Err(Error::DimensionMismatch {
            expected: spec.dimension + spec.param_ranges().len(),
            actual: arch.input_dim(),
        });
    }
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
    }
    let mut adam = AdamState::new(network.parameters().len(), config);
    let mut trace = TrainingTrace::default();
    let eval_stream = stream.named("eval");
    let step_stream = stream.named("steps");
    for step in 0..config.steps {
        let lr = lr_at(step, config)?;
        let est = estimate_loss(&network, spec, &step_stream.child(step as u64))?;
        if !est.value.is_finite() || est.parameter_gradient.iter().any(|g| !g.is_finite()) {
            if let Some(dir) = out_dir {
                save_checkpoint(&network, &dir.join("nonfinite.json"))?;
            }
            return Err(Error::NonFinite {
                step,
                what: format!("loss estimate {}", est.value),
            });
        }
        if step % config.eval_every == 0 {
            let rate = argmax_conflict_rate(&network, spec, config.eval_pairs, &eval_stream)?;
            log::debug!(
                "step {step}: lr {lr:.3e} loss {:.6} conflicts {:.4}%",
                est.value,
                100.0 * rate
            );
            trace.history.records.push(HistoryRecord {
                step,
                lr,
                loss: est.value,
                conflict_rate: rate,
            });
        }
        trace.losses.push(est.value);
        adam_update(&mut adam, network.parameters_mut(), &est.parameter_gradient, lr)?;
        if let Some(dir) = out_dir {
            if config.checkpoint_every > 0 && (step + 1) % config.checkpoint_every == 0 {
                save_checkpoint(&network, &dir.join(format!("checkpoint_{:06}.json", step + 1)))?;
            }
        }
    }
    Ok((network, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(steps: usize) -> TrainingConfig {
        TrainingConfig {
            steps,
            ..Default::default()
        }
    }

    #[test]
    fn schedule_endpoints() {
        let c = config(1000);
        assert_eq!(lr_at(0, &c).unwrap(), 1e-3);
        assert_eq!(lr_at(500, &c).unwrap(), 5e-4);
        assert!((lr_at(999, &c).unwrap() - 1e-3 / 1000.0).abs() < 1e-18);
        assert!(lr_at(1000, &c).is_err());
    }

    #[test]
    fn adam_zero_gradient_keeps_params() {
        let c = config(10);
        let mut s = AdamState::new(3, &c);
        let mut p = vec![0.5, -1.0, 2.0];
        adam_update(&mut s, &mut p, &[0.0; 3], 1e-3).unwrap();
        assert_eq!(p, vec![0.5, -1.0, 2.0]);
    }

    #[test]
    fn adam_first_step_is_signed_lr() {
        let c = config(10);
        let mut s = AdamState::new(4, &c);
        let mut p = vec![0.0; 4];
        let g = [0.3, -2.0, 1e-3, -50.0];
        adam_update(&mut s, &mut p, &g, 1e-2).unwrap();
        for (pi, gi) in p.iter().zip(&g) {
            assert!(pi.signum() == -gi.signum());
            assert!(pi.abs() <= 1e-2 && pi.abs() >= 0.99e-2, "{pi}");
        }
    }

    #[test]
    fn adam_is_deterministic_and_rejects_nan() {
        let c = config(10);
        let mut s1 = AdamState::new(2, &c);
        let mut s2 = s1.clone();
        let (mut p1, mut p2) = (vec![1.0, 2.0], vec![1.0, 2.0]);
        adam_update(&mut s1, &mut p1, &[0.1, 0.2], 1e-3).unwrap();
        adam_update(&mut s2, &mut p2, &[0.1, 0.2], 1e-3).unwrap();
        assert_eq!((p1, &s1), (p2, &s2));
        assert!(matches!(
            adam_update(&mut s1, &mut [0.0, 0.0], &[f64::NAN, 0.0], 1e-3),
            Err(Error::NonFinite { .. })
        ));
    }
}
