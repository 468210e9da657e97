use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::representation::{representation_to_symbol, DiagonalRepresentation};
use super::symbol::{apply_symbol, SchurSymbol};
use crate::cbmaps::LinearMatrixMap;
use crate::error::{dim_err, Result};
use crate::matrix::{BlockMatrix, ComplexMatrix};

/// A linear map on `N x N` grids of `d x d` blocks.
pub trait BlockMap {
    fn grid_size(&self) -> usize;
    fn block_dim(&self) -> usize;
    fn apply_block(&self, t: &BlockMatrix) -> Result<BlockMatrix>;
}

impl BlockMap for SchurSymbol {
    fn grid_size(&self) -> usize {
        SchurSymbol::grid_size(self)
    }

    fn block_dim(&self) -> usize {
        SchurSymbol::block_dim(self)
    }

    fn apply_block(&self, t: &BlockMatrix) -> Result<BlockMatrix> {
        apply_symbol(self, t)
    }
}

/// `ℰ(S)(k) = S_kk`.
pub fn diagonal_expectation(s: &BlockMatrix) -> Vec<ComplexMatrix> {
    (0..s.grid_size()).map(|k| s.block(k, k).clone()).collect()
}

/// `ℰ_n(S)(k) = S_kk` for the first `n` indices, zero beyond.
pub fn diagonal_expectation_n(s: &BlockMatrix, n: usize) -> Vec<ComplexMatrix> {
    let d = s.block_dim();
    (0..s.grid_size())
        .map(|k| {
            if k < n {
                s.block(k, k).clone()
            } else {
                ComplexMatrix::zeros(d, d)
            }
        })
        .collect()
}

/// `T ↦ Σ_i R_i T S_i` on flattened block matrices.
#[derive(Clone, Debug)]
pub struct TwoSidedMap {
    grid: usize,
    dim: usize,
    left: Vec<BlockMatrix>,
    right: Vec<BlockMatrix>,
}

pub fn two_sided_map(left: Vec<BlockMatrix>, right: Vec<BlockMatrix>) -> Result<TwoSidedMap> {
    if left.len() != right.len() {
        return dim_err(format!("{} left factors but {} right factors", left.len(), right.len()));
    }
    let shape = left.first().map_or((0, 0), |b| (b.grid_size(), b.block_dim()));
    if left
        .iter()
        .chain(&right)
        .any(|b| (b.grid_size(), b.block_dim()) != shape)
    {
        return dim_err("factors of unequal block shape");
    }
    Ok(TwoSidedMap {
        grid: shape.0,
        dim: shape.1,
        left,
        right,
    })
}

impl TwoSidedMap {
    /// Shape for an empty family, which acts as zero.
    pub fn with_shape(mut self, grid: usize, dim: usize) -> Self {
        if self.left.is_empty() {
            self.grid = grid;
            self.dim = dim;
        }
        self
    }

    pub fn left(&self) -> &[BlockMatrix] {
        &self.left
    }

    pub fn right(&self) -> &[BlockMatrix] {
        &self.right
    }
}

impl BlockMap for TwoSidedMap {
    fn grid_size(&self) -> usize {
        self.grid
    }

    fn block_dim(&self) -> usize {
        self.dim
    }

    fn apply_block(&self, t: &BlockMatrix) -> Result<BlockMatrix> {
        if (t.grid_size(), t.block_dim()) != (self.grid, self.dim) {
            return dim_err("block matrix shape differs from the two-sided map");
        }
        let n = self.grid * self.dim;
        let tf = t.flatten();
        let mut out = ComplexMatrix::zeros(n, n);
        for (r, s) in self.left.iter().zip(&self.right) {
            out += &(&(&r.flatten() * &tf) * &s.flatten());
        }
        BlockMatrix::reblock(&out, self.grid, self.dim)
    }
}

/// The Schur part of a block map: the symbol whose multiplier sends
/// `E_pq(a)` to the `(p, q)` block of `Ψ(E_pq(a))`. Under the `(n, m)`
/// action convention that block is produced by entry `(q, p)`.
pub fn schur_compression(psi: &dyn BlockMap) -> Result<SchurSymbol> {
    let (grid, d) = (psi.grid_size(), psi.block_dim());
    let mut entries: Vec<Vec<Option<LinearMatrixMap>>> = vec![vec![None; grid]; grid];
    for p in 0..grid {
        for q in 0..grid {
            let mut choi = ComplexMatrix::zeros(d * d, d * d);
            for i in 0..d {
                for j in 0..d {
                    let image = psi.apply_block(&BlockMatrix::unit(grid, p, q, &ComplexMatrix::unit(d, d, i, j)))?;
                    choi.set_submatrix(i * d, j * d, image.block(p, q));
                }
            }
            entries[q][p] = Some(LinearMatrixMap::from_choi(&choi, d, d)?);
        }
    }
    let entries = entries
        .into_iter()
        .map(|row| row.into_iter().map(|e| e.expect("every entry probed")).collect())
        .collect();
    SchurSymbol::new(grid, d, entries)
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CompressionIdentityReport {
    /// Largest Choi difference between the compression and the symbol of
    /// the diagonal families.
    pub symbol_residual: f64,
    /// Largest entry of `S_φ(T) − Σ ℰ(R_i) T ℰ(S_i)` over the trials.
    pub action_residual: f64,
    pub trials: usize,
}

/// Compares `schur_compression(two_sided_map(R, S))` with the symbol of
/// the diagonal families `(ℰ(R_i), ℰ(S_i))`, as symbols and by their action
/// on `trials` random block matrices.
pub fn diagonal_compression_identity_check(
    left: &[BlockMatrix],
    right: &[BlockMatrix],
    trials: usize,
    seed: u64,
) -> Result<CompressionIdentityReport> {
    let psi = two_sided_map(left.to_vec(), right.to_vec())?;
    let (grid, d) = (psi.grid, psi.dim);
    let lhs = schur_compression(&psi)?;
    let rep = DiagonalRepresentation::new(
        grid,
        d,
        left.iter().map(diagonal_expectation).collect(),
        right.iter().map(diagonal_expectation).collect(),
    )?;
    let rhs = representation_to_symbol(&rep);
    let diag_map = two_sided_map(
        left.iter()
            .map(|r| BlockMatrix::diagonal(&diagonal_expectation(r)))
            .collect::<Result<_>>()?,
        right
            .iter()
            .map(|s| BlockMatrix::diagonal(&diagonal_expectation(s)))
            .collect::<Result<_>>()?,
    )?
    .with_shape(grid, d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut action_residual: f64 = 0.0;
    for _ in 0..trials {
        let t = BlockMatrix::random(grid, d, &mut rng);
        let a = apply_symbol(&lhs, &t)?;
        let b = diag_map.apply_block(&t)?;
        action_residual = action_residual.max(a.max_diff(&b));
    }
    Ok(CompressionIdentityReport {
        symbol_residual: lhs.max_diff(&rhs),
        action_residual,
        trials,
    })
}
