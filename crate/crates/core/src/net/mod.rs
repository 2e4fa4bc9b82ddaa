//! Sine-activated coordinate networks with a softmax head.

mod checkpoint;
mod network;

pub use checkpoint::{load_checkpoint, save_checkpoint, CHECKPOINT_VERSION};
pub use network::{init_network, EvaluationTape, Gradients, Network, NetworkArchitecture, DEFAULT_OMEGA0};

use crate::error::Result;

/// A map from points (plus optional distance parameters) to probability
/// vectors. Implemented by [`Network`] and by the analytic reference
/// colorings.
pub trait ColoringFunction: Sync {
    fn spatial_dim(&self) -> usize;

    /// Number of appended parameter inputs the function consumes. Zero means
    /// the function takes bare coordinates.
    fn param_count(&self) -> usize {
        0
    }

    fn num_outputs(&self) -> usize;

    /// Evaluates a row-major batch of inputs of width
    /// `spatial_dim() + param_count()`; returns row-major probabilities.
    fn evaluate(&self, inputs: &[f64]) -> Result<Vec<f64>>;

    fn as_network(&self) -> Option<&Network> {
        None
    }
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(probs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &p) in probs.iter().enumerate().skip(1) {
        if p > probs[best] {
            best = i;
        }
    }
    best
}
