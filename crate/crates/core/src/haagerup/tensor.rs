use serde::{Deserialize, Deserializer, Serialize};

use crate::cbmaps::{cb_norm, LinearMatrixMap, PAIR_CUTOFF};
use crate::error::{dim_err, Result};
use crate::matrix::{ComplexMatrix, C64};

/// A finite tensor `v = Σ_k a_k ⊗ b_k` of `d x d` matrices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HaagerupTensor {
    dim: usize,
    rows: Vec<ComplexMatrix>,
    cols: Vec<ComplexMatrix>,
}

impl HaagerupTensor {
    pub fn new(dim: usize, rows: Vec<ComplexMatrix>, cols: Vec<ComplexMatrix>) -> Result<Self> {
        if rows.len() != cols.len() {
            return dim_err(format!("{} rows but {} cols", rows.len(), cols.len()));
        }
        for (k, m) in rows.iter().chain(&cols).enumerate() {
            if m.shape() != (dim, dim) {
                return dim_err(format!("term matrix {k} is {:?}, expected {dim}x{dim}", m.shape()));
            }
        }
        Ok(Self { dim, rows, cols })
    }

    /// The elementary tensor `a ⊗ b`.
    pub fn elementary(a: ComplexMatrix, b: ComplexMatrix) -> Result<Self> {
        Self::new(a.rows(), vec![a], vec![b])
    }

    /// `Σ_{ij} E_ij ⊗ E_ij` on `M_n`, whose elementary operator is the transpose.
    pub fn transpose_tensor(n: usize) -> Self {
        let units: Vec<_> = (0..n * n).map(|k| ComplexMatrix::unit(n, n, k / n, k % n)).collect();
        Self::new(n, units.clone(), units).expect("matrix units are n x n")
    }

    pub fn random<R: rand::Rng + ?Sized>(dim: usize, len: usize, rng: &mut R) -> Self {
        let rows = (0..len).map(|_| ComplexMatrix::random(dim, dim, rng)).collect();
        let cols = (0..len).map(|_| ComplexMatrix::random(dim, dim, rng)).collect();
        Self { dim, rows, cols }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[ComplexMatrix] {
        &self.rows
    }

    pub fn cols(&self) -> &[ComplexMatrix] {
        &self.cols
    }

    /// `Σ a_k* a_k`.
    pub fn row_gram(&self) -> ComplexMatrix {
        let mut g = ComplexMatrix::zeros(self.dim, self.dim);
        for a in &self.rows {
            g += &a.adjoint_mul(a);
        }
        g.hermitian_part()
    }

    /// `Σ b_k b_k*`.
    pub fn col_gram(&self) -> ComplexMatrix {
        let mut g = ComplexMatrix::zeros(self.dim, self.dim);
        for b in &self.cols {
            g += &(b * &b.adjoint());
        }
        g.hermitian_part()
    }

    /// The representation `c = a·F`, `d = F⁻¹·b`, i.e. `c_k = Σ_i a_i F_ik`
    /// and `d_k = Σ_i (F⁻¹)_ki b_i`. Represents the same tensor.
    pub fn transform(&self, f: &ComplexMatrix) -> Result<Self> {
        let r = self.len();
        if f.shape() != (r, r) {
            return dim_err(format!("transform {:?} for a tensor of length {r}", f.shape()));
        }
        let finv = f.inverse()?;
        let rows = combine(&self.rows, |i, k| f[(i, k)], self.dim);
        let cols = combine(&self.cols, |i, k| finv[(k, i)], self.dim);
        Self::new(self.dim, rows, cols)
    }
}

/// `out_k = Σ_i coeff(i, k) m_i`.
fn combine(ms: &[ComplexMatrix], coeff: impl Fn(usize, usize) -> C64, dim: usize) -> Vec<ComplexMatrix> {
    (0..ms.len())
        .map(|k| {
            let mut out = ComplexMatrix::zeros(dim, dim);
            for (i, m) in ms.iter().enumerate() {
                let c = coeff(i, k);
                if c.norm() != 0.0 {
                    out += &m.scale(c);
                }
            }
            out
        })
        .collect()
}

#[derive(Deserialize)]
struct TensorWire {
    dim: usize,
    rows: Vec<ComplexMatrix>,
    cols: Vec<ComplexMatrix>,
}

impl<'de> Deserialize<'de> for HaagerupTensor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = TensorWire::deserialize(d)?;
        HaagerupTensor::new(w.dim, w.rows, w.cols).map_err(serde::de::Error::custom)
    }
}

/// `Φ_v(r) = Σ_k b_k r a_k`.
pub fn elementary_operator(v: &HaagerupTensor) -> LinearMatrixMap {
    let pairs = v.cols.iter().cloned().zip(v.rows.iter().cloned()).collect();
    LinearMatrixMap::from_pairs(v.dim, v.dim, pairs).expect("tensor terms are d x d")
}

/// `‖Σ a_k* a_k‖^½`.
pub fn row_norm(v: &HaagerupTensor) -> f64 {
    v.row_gram().max_eigenvalue().max(0.0).sqrt()
}

/// `‖Σ b_k b_k*‖^½`.
pub fn col_norm(v: &HaagerupTensor) -> f64 {
    v.col_gram().max_eigenvalue().max(0.0).sqrt()
}

/// `‖v‖_h` as the cb norm of the elementary operator.
pub fn haagerup_norm_sdp(v: &HaagerupTensor, tol: f64) -> Result<f64> {
    cb_norm(&elementary_operator(v), tol)
}

/// An equivalent tensor with linearly independent rows and linearly
/// independent cols, from the SVD of `Σ vec(a_k) vec(b_k)ᵀ`.
pub fn minimal_length(v: &HaagerupTensor) -> HaagerupTensor {
    let d = v.dim;
    let n = d * d;
    if v.is_empty() || n == 0 {
        return HaagerupTensor::new(d, Vec::new(), Vec::new()).expect("empty tensor");
    }
    let mut big = ComplexMatrix::zeros(n, n);
    for (a, b) in v.rows.iter().zip(&v.cols) {
        big += &crate::matrix::outer(&a.vectorize(), &b.conj().vectorize());
    }
    let svd = big.svd();
    let top = svd.singular_values[0];
    let (mut rows, mut cols) = (Vec::new(), Vec::new());
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= PAIR_CUTOFF * top || s == 0.0 {
            break;
        }
        let r = s.sqrt();
        rows.push(ComplexMatrix::from_fn(d, d, |i, j| svd.u[(i * d + j, k)] * r));
        cols.push(ComplexMatrix::from_fn(d, d, |i, j| svd.v[(i * d + j, k)].conj() * r));
    }
    HaagerupTensor::new(d, rows, cols).expect("d x d by construction")
}
