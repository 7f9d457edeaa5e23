#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod linalg;
pub mod mesh;
pub mod radial;
pub mod spectrum;
pub mod torsion;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
