use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::symbol::SchurSymbol;
use crate::cbmaps::LinearMatrixMap;
use crate::error::{dim_err, Result};
use crate::matrix::ComplexMatrix;

/// Families `aⁱ_k`, `bⁱ_k` (`i < r`, `k < N`) of `d x d` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalRepresentation {
    grid: usize,
    dim: usize,
    a: Vec<Vec<ComplexMatrix>>,
    b: Vec<Vec<ComplexMatrix>>,
}

impl DiagonalRepresentation {
    pub fn new(grid: usize, dim: usize, a: Vec<Vec<ComplexMatrix>>, b: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        if a.len() != b.len() {
            return dim_err(format!("{} a-families but {} b-families", a.len(), b.len()));
        }
        for (i, fam) in a.iter().chain(&b).enumerate() {
            if fam.len() != grid {
                return dim_err(format!("family {i} has {} members, expected {grid}", fam.len()));
            }
            if let Some(m) = fam.iter().find(|m| m.shape() != (dim, dim)) {
                return dim_err(format!(
                    "family {i} holds a {:?} matrix, expected {dim}x{dim}",
                    m.shape()
                ));
            }
        }
        Ok(Self { grid, dim, a, b })
    }

    pub fn random<R: rand::Rng + ?Sized>(len: usize, grid: usize, dim: usize, rng: &mut R) -> Self {
        let mut fam = || -> Vec<Vec<ComplexMatrix>> {
            (0..len)
                .map(|_| (0..grid).map(|_| ComplexMatrix::random(dim, dim, rng)).collect())
                .collect()
        };
        let a = fam();
        let b = fam();
        Self { grid, dim, a, b }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn grid_size(&self) -> usize {
        self.grid
    }

    pub fn block_dim(&self) -> usize {
        self.dim
    }

    pub fn a(&self, i: usize, k: usize) -> &ComplexMatrix {
        &self.a[i][k]
    }

    pub fn b(&self, i: usize, k: usize) -> &ComplexMatrix {
        &self.b[i][k]
    }
}

/// Entry `(m, n)` acts as `x ↦ Σ_i aⁱ_n x bⁱ_m`.
pub fn representation_to_symbol(rep: &DiagonalRepresentation) -> SchurSymbol {
    let d = rep.dim;
    SchurSymbol::from_fn(rep.grid, d, |m, n| {
        let pairs = (0..rep.len())
            .map(|i| (rep.a[i][n].clone(), rep.b[i][m].clone()))
            .collect();
        LinearMatrixMap::from_pairs(d, d, pairs).expect("d x d families")
    })
    .expect("N x N grid of d x d maps")
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DecayReport {
    /// `k ↦ ‖Σ_i aⁱ_k (aⁱ_k)*‖`.
    pub row_decay: Vec<f64>,
    /// `k ↦ ‖Σ_i (bⁱ_k)* bⁱ_k‖`.
    pub col_decay: Vec<f64>,
}

pub fn representation_decay_report(rep: &DiagonalRepresentation) -> DecayReport {
    let d = rep.dim;
    let gram_norm = |f: &dyn Fn(usize) -> ComplexMatrix| -> Vec<f64> {
        (0..rep.grid).map(|k| f(k).max_eigenvalue().max(0.0)).collect()
    };
    let row_decay = gram_norm(&|k| {
        let mut g = ComplexMatrix::zeros(d, d);
        for fam in &rep.a {
            g += &(&fam[k] * &fam[k].adjoint());
        }
        g.hermitian_part()
    });
    let col_decay = gram_norm(&|k| {
        let mut g = ComplexMatrix::zeros(d, d);
        for fam in &rep.b {
            g += &fam[k].adjoint_mul(&fam[k]);
        }
        g.hermitian_part()
    });
    DecayReport { row_decay, col_decay }
}

/// `maxₖ‖Σ aⁱ_k (aⁱ_k)*‖^½ · maxₖ‖Σ (bⁱ_k)* bⁱ_k‖^½`, the row/column bound
/// witnessed by the block-diagonal factors `diag(aⁱ_k)`, `diag(bⁱ_k)`.
pub fn representation_bound(rep: &DiagonalRepresentation) -> f64 {
    let r = representation_decay_report(rep);
    let top = |v: &[f64]| v.iter().copied().fold(0.0, f64::max).sqrt();
    top(&r.row_decay) * top(&r.col_decay)
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct RepresentationWire {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grid_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    block_dim: Option<usize>,
    a: Vec<Vec<ComplexMatrix>>,
    b: Vec<Vec<ComplexMatrix>>,
}

impl Serialize for DiagonalRepresentation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RepresentationWire {
            grid_size: self.a.is_empty().then_some(self.grid),
            block_dim: self.a.is_empty().then_some(self.dim),
            a: self.a.clone(),
            b: self.b.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiagonalRepresentation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = RepresentationWire::deserialize(d)?;
        let grid = w.grid_size.or_else(|| w.a.first().map(Vec::len)).unwrap_or(0);
        let dim = w
            .block_dim
            .or_else(|| w.a.first().and_then(|f| f.first()).map(|m| m.rows()))
            .unwrap_or(0);
        DiagonalRepresentation::new(grid, dim, w.a, w.b).map_err(serde::de::Error::custom)
    }
}
