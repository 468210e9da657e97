use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cbmaps::LinearMatrixMap;
use crate::error::{dim_err, Result};
use crate::matrix::{BlockMatrix, ComplexMatrix, C64};

/// Entries closer than this (in Choi max-norm) to `c·id` count as scalar.
pub const SCALAR_TOL: f64 = 1e-13;

/// An `N x N` grid of maps `M_d → M_d`, the truncated symbol of a Schur
/// multiplier acting by `(T_mn) ↦ (φ(n,m)(T_mn))`.
#[derive(Clone, Debug, PartialEq)]
pub struct SchurSymbol {
    grid: usize,
    dim: usize,
    entries: Vec<LinearMatrixMap>,
    scalar: Option<ComplexMatrix>,
}

impl SchurSymbol {
    /// Builds from row-major entries and caches the scalar values when
    /// every entry is a multiple of the identity.
    pub fn new(grid: usize, dim: usize, entries: Vec<Vec<LinearMatrixMap>>) -> Result<Self> {
        if entries.len() != grid || entries.iter().any(|row| row.len() != grid) {
            return dim_err(format!("expected a {grid}x{grid} grid of entry maps"));
        }
        let entries: Vec<_> = entries.into_iter().flatten().collect();
        if let Some(bad) = entries.iter().find(|m| m.in_dim() != dim || m.out_dim() != dim) {
            return dim_err(format!(
                "entry map M_{} -> M_{} in a symbol with block size {dim}",
                bad.in_dim(),
                bad.out_dim()
            ));
        }
        Ok(Self::from_flat(grid, dim, entries))
    }

    fn from_flat(grid: usize, dim: usize, entries: Vec<LinearMatrixMap>) -> Self {
        let values: Option<Vec<C64>> = entries.iter().map(|m| m.as_scalar(SCALAR_TOL)).collect();
        let scalar = values.map(|v| ComplexMatrix::from_vec(grid, grid, v).expect("N*N values"));
        Self {
            grid,
            dim,
            entries,
            scalar,
        }
    }

    /// Entry `(m, n)` acts as `X ↦ φ[m, n] X` on `M_d`.
    pub fn from_scalar(phi: &ComplexMatrix, dim: usize) -> Result<Self> {
        if !phi.is_square() {
            return dim_err(format!("scalar symbol must be square, got {:?}", phi.shape()));
        }
        let id = LinearMatrixMap::identity(dim);
        let entries = phi.as_slice().iter().map(|&c| id.scale(c)).collect();
        Ok(Self::from_flat(phi.rows(), dim, entries))
    }

    pub fn from_fn(grid: usize, dim: usize, mut f: impl FnMut(usize, usize) -> LinearMatrixMap) -> Result<Self> {
        let entries = (0..grid).map(|m| (0..grid).map(|n| f(m, n)).collect()).collect();
        Self::new(grid, dim, entries)
    }

    pub fn identity(grid: usize, dim: usize) -> Self {
        Self::from_scalar(&ComplexMatrix::from_fn(grid, grid, |_, _| C64::new(1.0, 0.0)), dim).expect("square")
    }

    pub fn zero(grid: usize, dim: usize) -> Self {
        Self::from_scalar(&ComplexMatrix::zeros(grid, grid), dim).expect("square")
    }

    pub fn random<R: rand::Rng + ?Sized>(grid: usize, dim: usize, num_pairs: usize, rng: &mut R) -> Self {
        let entries = (0..grid * grid)
            .map(|_| LinearMatrixMap::random(dim, dim, num_pairs, rng))
            .collect();
        Self::from_flat(grid, dim, entries)
    }

    pub fn grid_size(&self) -> usize {
        self.grid
    }

    pub fn block_dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, m: usize, n: usize) -> &LinearMatrixMap {
        &self.entries[m * self.grid + n]
    }

    pub fn is_scalar(&self) -> bool {
        self.scalar.is_some()
    }

    /// The cached `N x N` scalar values, if every entry is scalar.
    pub fn scalar_values(&self) -> Option<&ComplexMatrix> {
        self.scalar.as_ref()
    }

    /// The symbol with every entry replaced by `f(m, n, entry)`.
    pub fn map_entries(&self, mut f: impl FnMut(usize, usize, &LinearMatrixMap) -> LinearMatrixMap) -> Self {
        let entries = (0..self.grid * self.grid)
            .map(|k| f(k / self.grid, k % self.grid, &self.entries[k]))
            .collect();
        Self::from_flat(self.grid, self.dim, entries)
    }

    /// Largest Choi-matrix difference over entries.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.grid, self.dim), (other.grid, other.dim), "symbol shape mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.choi().max_diff(b.choi()))
            .fold(0.0, f64::max)
    }

    /// The multiplier as one map on `M_{Nd}`, with pairs
    /// `(E_mm ⊗ A, E_nn ⊗ B)` for each pair `(A, B)` of entry `(n, m)`.
    pub fn assembled_map(&self) -> LinearMatrixMap {
        let (n_grid, d) = (self.grid, self.dim);
        let big = n_grid * d;
        let mut pairs = Vec::new();
        for m in 0..n_grid {
            for n in 0..n_grid {
                for (a, b) in self.entry(n, m).pairs() {
                    let mut pa = ComplexMatrix::zeros(big, big);
                    pa.set_submatrix(m * d, m * d, a);
                    let mut pb = ComplexMatrix::zeros(big, big);
                    pb.set_submatrix(n * d, n * d, b);
                    pairs.push((pa, pb));
                }
            }
        }
        LinearMatrixMap::from_pairs(big, big, pairs).expect("block-embedded pairs")
    }
}

/// Output block `(m, n)` is `φ(n, m)` applied to `T_mn`.
pub fn apply_symbol(phi: &SchurSymbol, t: &BlockMatrix) -> Result<BlockMatrix> {
    if (t.grid_size(), t.block_dim()) != (phi.grid, phi.dim) {
        return dim_err(format!(
            "block matrix {}x{} of {}x{} blocks for a symbol on a {}x{} grid of {}x{} blocks",
            t.grid_size(),
            t.grid_size(),
            t.block_dim(),
            t.block_dim(),
            phi.grid,
            phi.grid,
            phi.dim,
            phi.dim
        ));
    }
    Ok(BlockMatrix::from_fn(phi.grid, phi.dim, |m, n| {
        phi.entry(n, m).apply_unchecked(t.block(m, n))
    }))
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct SymbolWire {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grid_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    block_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    entries: Option<Vec<Vec<LinearMatrixMap>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scalar: Option<Vec<Vec<ScalarWire>>>,
}

/// A scalar entry: a plain number or `[re, im]`.
#[derive(Serialize, Deserialize, Clone, Copy)]
#[serde(untagged)]
enum ScalarWire {
    Real(f64),
    Complex([f64; 2]),
}

impl From<ScalarWire> for C64 {
    fn from(w: ScalarWire) -> Self {
        match w {
            ScalarWire::Real(x) => C64::new(x, 0.0),
            ScalarWire::Complex([re, im]) => C64::new(re, im),
        }
    }
}

impl Serialize for SchurSymbol {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = match &self.scalar {
            Some(phi) => SymbolWire {
                grid_size: None,
                block_dim: (self.dim != 1).then_some(self.dim),
                entries: None,
                scalar: Some(
                    (0..self.grid)
                        .map(|m| {
                            (0..self.grid)
                                .map(|n| {
                                    let z = phi[(m, n)];
                                    if z.im == 0.0 {
                                        ScalarWire::Real(z.re)
                                    } else {
                                        ScalarWire::Complex([z.re, z.im])
                                    }
                                })
                                .collect()
                        })
                        .collect(),
                ),
            },
            None => SymbolWire {
                grid_size: Some(self.grid),
                block_dim: Some(self.dim),
                entries: Some(
                    (0..self.grid)
                        .map(|m| (0..self.grid).map(|n| self.entry(m, n).clone()).collect())
                        .collect(),
                ),
                scalar: None,
            },
        };
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SchurSymbol {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = SymbolWire::deserialize(d)?;
        match (w.entries, w.scalar) {
            (Some(entries), None) => {
                let grid = w.grid_size.unwrap_or(entries.len());
                let dim = match (w.block_dim, entries.first().and_then(|r| r.first())) {
                    (Some(d), _) => d,
                    (None, Some(m)) => m.in_dim(),
                    (None, None) => 0,
                };
                SchurSymbol::new(grid, dim, entries).map_err(D::Error::custom)
            }
            (None, Some(rows)) => {
                let n = rows.len();
                if let Some(k) = rows.iter().position(|r| r.len() != n) {
                    return Err(D::Error::custom(format!(
                        "scalar row {k} has {} entries, expected {n}",
                        rows[k].len()
                    )));
                }
                if w.grid_size.is_some_and(|g| g != n) {
                    return Err(D::Error::custom("gridSize disagrees with the scalar grid"));
                }
                let values = rows.into_iter().flatten().map(C64::from).collect();
                let phi = ComplexMatrix::from_vec(n, n, values).map_err(D::Error::custom)?;
                SchurSymbol::from_scalar(&phi, w.block_dim.unwrap_or(1)).map_err(D::Error::custom)
            }
            _ => Err(D::Error::custom(
                "a symbol needs exactly one of \"entries\" or \"scalar\"",
            )),
        }
    }
}
