//! Turns a trained network into an exactly certified periodic coloring:
//! periodicity detection, periodic retraining, discretization onto a cell
//! grid, conflict repair, and verification.

mod coloring;
mod graph;
mod periodicity;
mod pipeline;
mod repair;
mod verify;

pub use coloring::{CellColoring, COLORING_VERSION};
pub use graph::{conflict_edges, hitting_set, ConflictEdge, ConflictGraph};
pub use periodicity::{extract_periodicity, PeriodicityParams};
pub use pipeline::{
    default_resolution, discretize, formalize_pipeline, initial_stream, retrain_periodic, FormalizeParams,
    PipelineInput, PipelineOutcome,
};
pub use repair::repair;
pub use verify::{format_sig6, verify, VerificationReport, Violation};
