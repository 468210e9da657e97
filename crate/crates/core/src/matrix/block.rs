use super::dense::ComplexMatrix;
use crate::error::{dim_err, Result};

/// An `N x N` grid of `d x d` blocks, the finite picture of an operator
/// matrix `(T_{m,n})` with entries in `M_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMatrix {
    grid: usize,
    dim: usize,
    blocks: Vec<ComplexMatrix>,
}

impl BlockMatrix {
    pub fn zeros(grid: usize, dim: usize) -> Self {
        Self {
            grid,
            dim,
            blocks: vec![ComplexMatrix::zeros(dim, dim); grid * grid],
        }
    }

    pub fn identity(grid: usize, dim: usize) -> Self {
        let mut b = Self::zeros(grid, dim);
        for k in 0..grid {
            *b.block_mut(k, k) = ComplexMatrix::identity(dim);
        }
        b
    }

    /// Builds from row-major nested blocks; every block must be `d x d`.
    pub fn from_blocks(grid: usize, dim: usize, blocks: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        if blocks.len() != grid || blocks.iter().any(|row| row.len() != grid) {
            return dim_err(format!("expected a {grid}x{grid} grid of blocks"));
        }
        let flat: Vec<ComplexMatrix> = blocks.into_iter().flatten().collect();
        if let Some(bad) = flat.iter().find(|b| b.shape() != (dim, dim)) {
            return dim_err(format!(
                "block of shape {:?} in a grid of {dim}x{dim} blocks",
                bad.shape()
            ));
        }
        Ok(Self {
            grid,
            dim,
            blocks: flat,
        })
    }

    pub fn from_fn(grid: usize, dim: usize, mut f: impl FnMut(usize, usize) -> ComplexMatrix) -> Self {
        let mut blocks = Vec::with_capacity(grid * grid);
        for m in 0..grid {
            for n in 0..grid {
                let b = f(m, n);
                assert_eq!(b.shape(), (dim, dim), "block ({m},{n}) has the wrong shape");
                blocks.push(b);
            }
        }
        Self { grid, dim, blocks }
    }

    /// Block-diagonal matrix `diag(d_1, ..., d_N)`.
    pub fn diagonal(diag: &[ComplexMatrix]) -> Result<Self> {
        let grid = diag.len();
        let dim = diag.first().map_or(0, |b| b.rows());
        if diag.iter().any(|b| b.shape() != (dim, dim)) {
            return dim_err("diagonal blocks of unequal shape");
        }
        let mut out = Self::zeros(grid, dim);
        for (k, b) in diag.iter().enumerate() {
            *out.block_mut(k, k) = b.clone();
        }
        Ok(out)
    }

    /// `E_{p,q}(a)`: zero except block `(p, q)` which is `a`.
    pub fn unit(grid: usize, p: usize, q: usize, a: &ComplexMatrix) -> Self {
        let mut out = Self::zeros(grid, a.rows());
        *out.block_mut(p, q) = a.clone();
        out
    }

    pub fn random<R: rand::Rng + ?Sized>(grid: usize, dim: usize, rng: &mut R) -> Self {
        Self::from_fn(grid, dim, |_, _| ComplexMatrix::random(dim, dim, rng))
    }

    pub fn grid_size(&self) -> usize {
        self.grid
    }

    pub fn block_dim(&self) -> usize {
        self.dim
    }

    pub fn block(&self, m: usize, n: usize) -> &ComplexMatrix {
        &self.blocks[m * self.grid + n]
    }

    pub fn block_mut(&mut self, m: usize, n: usize) -> &mut ComplexMatrix {
        &mut self.blocks[m * self.grid + n]
    }

    /// Assembles the `(N d) x (N d)` matrix.
    pub fn flatten(&self) -> ComplexMatrix {
        let (g, d) = (self.grid, self.dim);
        let mut out = ComplexMatrix::zeros(g * d, g * d);
        for m in 0..g {
            for n in 0..g {
                out.set_submatrix(m * d, n * d, self.block(m, n));
            }
        }
        out
    }

    /// Splits an `(N d) x (N d)` matrix into `d x d` blocks.
    pub fn reblock(m: &ComplexMatrix, grid: usize, dim: usize) -> Result<Self> {
        if m.shape() != (grid * dim, grid * dim) {
            return dim_err(format!(
                "cannot reblock a {}x{} matrix into a {grid}x{grid} grid of {dim}x{dim} blocks",
                m.rows(),
                m.cols()
            ));
        }
        Ok(Self::from_fn(grid, dim, |p, q| m.submatrix(p * dim, q * dim, dim, dim)))
    }

    /// Hilbert-Schmidt norm of the assembled matrix.
    pub fn hs_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.frobenius_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn operator_norm(&self) -> f64 {
        self.flatten().norm()
    }

    pub fn max_block_norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm()).fold(0.0, f64::max)
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.grid, self.dim), (other.grid, other.dim), "block shape mismatch");
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.max_diff(b))
            .fold(0.0, f64::max)
    }

    pub fn blocks(&self) -> impl Iterator<Item = ((usize, usize), &ComplexMatrix)> {
        let g = self.grid;
        self.blocks.iter().enumerate().map(move |(k, b)| ((k / g, k % g), b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_block_flatten_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = ComplexMatrix::random(3, 3, &mut rng);
        let t = BlockMatrix::from_blocks(1, 3, vec![vec![a.clone()]]).unwrap();
        assert_eq!(t.flatten(), a);
    }

    #[test]
    fn reblock_inverts_flatten() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = BlockMatrix::random(3, 2, &mut rng);
        assert_eq!(BlockMatrix::reblock(&t.flatten(), 3, 2).unwrap(), t);
        assert!(BlockMatrix::reblock(&t.flatten(), 2, 2).is_err());
    }

    #[test]
    fn flatten_norm_matches_assembled_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = BlockMatrix::random(2, 2, &mut rng);
        // hand-assembled 4x4 matrix
        let direct = ComplexMatrix::from_fn(4, 4, |i, j| t.block(i / 2, j / 2)[(i % 2, j % 2)]);
        assert_eq!(direct, t.flatten());
        assert!((t.operator_norm() - direct.norm()).abs() < 1e-10);
        assert!(t.operator_norm() >= t.max_block_norm() - 1e-12);
    }

    #[test]
    fn rejects_wrong_block_shape() {
        let err = BlockMatrix::from_blocks(1, 2, vec![vec![ComplexMatrix::zeros(3, 3)]]);
        assert!(err.is_err());
    }
}
