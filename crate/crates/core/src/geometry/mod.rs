//! Sampling primitives and exact geometric kernels.

pub mod cells;
pub mod lattice;
pub mod sampling;
pub mod triangle;

pub use cells::{cell_distance_interval, lattice_translates, CellGrid, DistanceInterval, INTERVAL_PADDING};
pub use lattice::{wrap_periodic, Lattice};
pub use sampling::{sample_box, sample_lp_sphere, sample_sphere};
pub use triangle::triangle_third_points;
