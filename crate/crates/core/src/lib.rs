// Negated comparisons are used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod evaluate;
pub mod formalize;
pub mod geometry;
pub mod loss;
pub mod net;
pub mod render;
pub mod stream;
pub mod train;

pub use error::{Error, Result};
pub use stream::Stream;
