use rand::Rng;
use serde::{Deserialize, Serialize};

use super::periodicity::{extract_periodicity, PeriodicityParams};
use super::{repair, verify, CellColoring, VerificationReport};
use crate::error::{Error, Result};
use crate::geometry::Lattice;
use crate::loss::{DistanceSpec, LossSpec};
use crate::net::{argmax, init_network, ColoringFunction, Network};
use crate::stream::Stream;
use crate::train::{train, TrainingConfig};

/// Default cells per lattice axis.
pub fn default_resolution(dim: usize) -> Vec<usize> {
    vec![if dim == 3 { 40 } else { 200 }; dim]
}

/// Replaces the input layer of `network` by reduction modulo `lattice` and
/// trains a fresh copy of the architecture on `spec`.
pub fn retrain_periodic(
    network: &Network,
    lattice: &Lattice,
    spec: &LossSpec,
    config: &TrainingConfig,
    stream: &Stream,
) -> Result<Network> {
    let mut arch = network.architecture().clone();
    arch.periodic_wrap = Some(lattice.clone());
    let seed: u64 = stream.named("init").rng().random();
    let fresh = init_network(&arch, seed)?;
    let (trained, _) = train(fresh, spec, config, &stream.named("train"))?;
    Ok(trained)
}

/// Colors each cell by the argmax at its center.
///
/// Output `c + 1` of a coloring with `c + 1` outputs (for
/// `c = avoided_distances.len()`) becomes the bonus color.
pub fn discretize(
    coloring: &dyn ColoringFunction,
    lattice: &Lattice,
    resolution: &[usize],
    avoided_distances: Vec<f64>,
) -> Result<CellColoring> {
    let c = avoided_distances.len();
    let a = coloring.num_outputs();
    if coloring.param_count() != 0 {
        return Err(Error::invalid("cannot discretize a coloring with parameter inputs"));
    }
    if coloring.spatial_dim() != lattice.dim() {
        return Err(Error::DimensionMismatch {
            expected: lattice.dim(),
            actual: coloring.spatial_dim(),
        });
    }
    if a != c && a != c + 1 {
        return Err(Error::VariantMismatch(format!("{a} outputs for {c} regular colors")));
    }
    let mut blank = CellColoring::filled(lattice.clone(), resolution, avoided_distances, 1)?;
    let grid = blank.grid().clone();
    let mut inputs = Vec::with_capacity(grid.cell_count() * grid.dim());
    for cell in 0..grid.cell_count() {
        inputs.extend(grid.center(&grid.unlinear(cell)));
    }
    let probs = coloring.evaluate(&inputs)?;
    for (cell, p) in probs.chunks(a).enumerate() {
        blank.set_color(cell, argmax(p) as u32 + 1);
    }
    Ok(blank)
}

/// Knobs of the formalization pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FormalizeParams {
    pub periodicity: PeriodicityParams,
    /// Cells per lattice axis; defaults to 200 (2D) or 40 (3D).
    pub resolution: Option<Vec<usize>>,
    pub rounds: usize,
    /// Skips periodicity extraction when set.
    pub lattice: Option<Lattice>,
}

impl Default for FormalizeParams {
    fn default() -> Self {
        FormalizeParams {
            periodicity: PeriodicityParams::default(),
            resolution: None,
            rounds: 3,
            lattice: None,
        }
    }
}

/// Where the pipeline starts.
pub enum PipelineInput<'a> {
    /// A trained network; periodic networks go straight to discretization.
    Network(&'a Network),
    /// Train from scratch first.
    Fresh(Network),
}

#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub coloring: CellColoring,
    pub report: VerificationReport,
    pub lattice: Lattice,
    pub periodic_network: Network,
    /// Whether the lattice came from periodicity extraction.
    pub extracted: bool,
}

/// Stream the pipeline trains a fresh network with.
pub fn initial_stream(pipeline: &Stream) -> Stream {
    pipeline.named("initial")
}

/// Train (if needed), detect periods, retrain periodically, discretize,
/// repair, and certify.
pub fn formalize_pipeline(
    input: PipelineInput<'_>,
    spec: &LossSpec,
    config: &TrainingConfig,
    params: &FormalizeParams,
    stream: &Stream,
) -> Result<PipelineOutcome> {
    let distances: Vec<f64> = spec
        .color_distances()
        .iter()
        .map(|d| match d {
            DistanceSpec::Fixed(v) => Ok(*v),
            DistanceSpec::Range(_) => Err(Error::invalid("formalization needs fixed distances")),
        })
        .collect::<Result<_>>()?;
    let trained;
    let network = match input {
        PipelineInput::Network(n) => n,
        PipelineInput::Fresh(n) => {
            log::info!("training the initial network");
            trained = train(n, spec, config, &initial_stream(stream))?.0;
            &trained
        }
    };
    let (periodic, lattice, extracted) = match network.lattice() {
        Some(l) => {
            log::info!("network is already periodic; skipping to discretization");
            (network.clone(), l.clone(), false)
        }
        None => {
            let (lattice, extracted) = match &params.lattice {
                Some(l) => {
                    log::info!("using the supplied lattice; skipping periodicity extraction");
                    (l.clone(), false)
                }
                None => (extract_periodicity(network, &params.periodicity)?, true),
            };
            log::info!("lattice {:?}; retraining with exact periodicity", lattice.vectors());
            let p = retrain_periodic(network, &lattice, spec, config, &stream.named("periodic"))?;
            (p, lattice, extracted)
        }
    };
    let resolution = params
        .resolution
        .clone()
        .unwrap_or_else(|| default_resolution(lattice.dim()));
    let raw = discretize(&periodic, &lattice, &resolution, distances)?;
    let coloring = repair(&raw, params.rounds);
    let report = verify(&coloring);
    Ok(PipelineOutcome {
        coloring,
        report,
        lattice,
        periodic_network: periodic,
        extracted,
    })
}
