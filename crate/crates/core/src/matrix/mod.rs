//! Dense complex linear algebra: matrices, block matrices, factorizations
//! and norms.

mod block;
mod decomp;
mod dense;
mod io;

pub use block::BlockMatrix;
pub use decomp::{HermitianEigen, Svd};
pub use dense::{outer, vec_inner, vec_norm, ComplexMatrix, C64, I, ONE, ZERO};

use crate::error::Result;

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> Result<f64> {
    m.operator_norm()
}

pub fn adjoint(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// See [`ComplexMatrix::psd_cholesky`].
pub fn psd_cholesky(m: &ComplexMatrix, tol: f64) -> Result<Option<ComplexMatrix>> {
    m.psd_cholesky(tol)
}

pub fn flatten(t: &BlockMatrix) -> ComplexMatrix {
    t.flatten()
}

pub fn reblock(m: &ComplexMatrix, grid: usize, dim: usize) -> Result<BlockMatrix> {
    BlockMatrix::reblock(m, grid, dim)
}
