//! Operator-space norms for maps between matrix algebras.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod cbmaps;
pub mod cli;
pub mod error;
pub mod haagerup;
pub mod matrix;
pub mod schur;
pub mod sdp;
pub mod suite;

pub use cbmaps::LinearMatrixMap;
pub use error::{Error, Result};
pub use matrix::{BlockMatrix, ComplexMatrix, C64};
