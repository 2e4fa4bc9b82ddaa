//! Post-hoc measurements: argmax conflict rates, distance sweeps, distance
//! optimization, and the analytic reference colorings.

mod conflict;
mod optimize;
mod reference;
mod sweep;

pub use conflict::argmax_conflict_rate;
pub use optimize::{optimize_distances, OptimizeOptions, OptimizeResult};
pub use reference::{reference_coloring, ReferenceColoring, ReferenceColoringId};
pub use sweep::{distance_sweep, pin_distances, DistanceGrid, SweepResult};
