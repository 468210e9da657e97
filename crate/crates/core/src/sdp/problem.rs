use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{dim_err, Error, Result};
use crate::matrix::{ComplexMatrix, C64, ZERO};

use super::dense::pivoted_cholesky_rank;

/// A Hermitian matrix on a block-diagonal space, stored as its nonzero
/// entries `(block, row, col, value)` (both triangles).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseHermitian {
    entries: Vec<(usize, usize, usize, C64)>,
}

impl SparseHermitian {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `value` at `(row, col)` of `block` and its conjugate at the
    /// mirrored position. Diagonal values must be real.
    pub fn push(&mut self, block: usize, row: usize, col: usize, value: C64) {
        if row == col {
            self.entries.push((block, row, col, C64::new(value.re, 0.0)));
        } else {
            self.entries.push((block, row, col, value));
            self.entries.push((block, col, row, value.conj()));
        }
    }

    /// Adds a real multiple of the identity on `block`.
    pub fn push_identity(&mut self, block: usize, dim: usize, scale: f64) {
        for k in 0..dim {
            self.push(block, k, k, C64::new(scale, 0.0));
        }
    }

    pub fn from_dense_blocks(blocks: &[ComplexMatrix]) -> Self {
        let mut s = Self::new();
        for (b, m) in blocks.iter().enumerate() {
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    if m[(i, j)] != ZERO {
                        s.entries.push((b, i, j, m[(i, j)]));
                    }
                }
            }
        }
        s
    }

    pub fn entries(&self) -> &[(usize, usize, usize, C64)] {
        &self.entries
    }

    /// Merges repeated positions and drops exact zeros.
    pub(crate) fn compact(&mut self) {
        let mut acc: Vec<((usize, usize, usize), C64)> = Vec::new();
        let mut index: HashMap<(usize, usize, usize), usize> = HashMap::new();
        for &(b, r, c, v) in &self.entries {
            match index.get(&(b, r, c)) {
                Some(&k) => acc[k].1 += v,
                None => {
                    index.insert((b, r, c), acc.len());
                    acc.push(((b, r, c), v));
                }
            }
        }
        self.entries = acc
            .into_iter()
            .filter(|(_, v)| *v != ZERO)
            .map(|((b, r, c), v)| (b, r, c, v))
            .collect();
    }

    pub fn to_dense(&self, dims: &[usize]) -> Vec<ComplexMatrix> {
        let mut out: Vec<ComplexMatrix> = dims.iter().map(|&n| ComplexMatrix::zeros(n, n)).collect();
        for &(b, r, c, v) in &self.entries {
            out[b][(r, c)] += v;
        }
        out
    }

    /// `Re tr(A X)` for block-diagonal `X`.
    pub fn trace_with(&self, x: &[ComplexMatrix]) -> f64 {
        self.entries
            .iter()
            .map(|&(b, r, c, v)| {
                let w = x[b][(c, r)];
                v.re * w.re - v.im * w.im
            })
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.3.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `min Re⟨C, X⟩  s.t.  Re⟨A_i, X⟩ = b_i,  X ⪰ 0` over block-diagonal
/// Hermitian `X`. Its dual is `max bᵀy  s.t.  C − Σ y_i A_i = Z ⪰ 0`.
#[derive(Clone, Debug)]
pub struct SdpProblem {
    block_dims: Vec<usize>,
    objective: Vec<ComplexMatrix>,
    constraints: Vec<SparseHermitian>,
    rhs: Vec<f64>,
    /// A dual ray `y` with `Σ y_i A_i = 0` and `bᵀy > 0`, found when the
    /// constraint system is dependent and inconsistent.
    infeasibility_ray: Option<Vec<f64>>,
}

const HERMITIAN_TOL: f64 = 1e-12;

impl SdpProblem {
    /// Validates shapes and Hermitian symmetry and checks the constraint
    /// matrices for linear dependence. A dependent but consistent system is
    /// rejected; a dependent and inconsistent one is accepted and solves to
    /// `Infeasible`.
    pub fn new(
        block_dims: Vec<usize>,
        objective: Vec<ComplexMatrix>,
        constraints: Vec<(SparseHermitian, f64)>,
    ) -> Result<Self> {
        if block_dims.is_empty() || block_dims.contains(&0) {
            return Err(Error::InvalidArgument(
                "every PSD block needs a positive dimension".into(),
            ));
        }
        if objective.len() != block_dims.len() {
            return dim_err(format!(
                "{} objective blocks for {} PSD blocks",
                objective.len(),
                block_dims.len()
            ));
        }
        for (c, &n) in objective.iter().zip(&block_dims) {
            if c.shape() != (n, n) {
                return dim_err(format!("objective block {:?} for a block of size {n}", c.shape()));
            }
            let defect = c.hermitian_defect();
            if defect > HERMITIAN_TOL * c.max_abs().max(1.0) {
                return Err(Error::NotHermitian(defect));
            }
        }
        let (mut mats, rhs): (Vec<_>, Vec<_>) = constraints.into_iter().unzip();
        for a in mats.iter_mut() {
            a.compact();
            for &(b, r, c, _) in a.entries() {
                if b >= block_dims.len() || r >= block_dims[b] || c >= block_dims[b] {
                    return dim_err(format!("constraint entry ({b}, {r}, {c}) out of range"));
                }
            }
            let dense = a.to_dense(&block_dims);
            for m in &dense {
                let defect = m.hermitian_defect();
                if defect > HERMITIAN_TOL * m.max_abs().max(1.0) {
                    return Err(Error::NotHermitian(defect));
                }
            }
        }
        if rhs.iter().any(|b: &f64| !b.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut p = Self {
            block_dims,
            objective: objective.iter().map(|c| c.hermitian_part()).collect(),
            constraints: mats,
            rhs,
            infeasibility_ray: None,
        };
        p.infeasibility_ray = p.dependence_check()?;
        Ok(p)
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn objective(&self) -> &[ComplexMatrix] {
        &self.objective
    }

    pub fn constraints(&self) -> &[SparseHermitian] {
        &self.constraints
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub(crate) fn infeasibility_ray(&self) -> Option<&[f64]> {
        self.infeasibility_ray.as_deref()
    }

    /// `(⟨A_i, A_j⟩)_{ij}`, real symmetric, row-major.
    fn constraint_gram(&self) -> Vec<f64> {
        let m = self.constraints.len();
        let mut by_pos: HashMap<(usize, usize, usize), Vec<(usize, C64)>> = HashMap::new();
        for (i, a) in self.constraints.iter().enumerate() {
            for &(b, r, c, v) in a.entries() {
                by_pos.entry((b, r, c)).or_default().push((i, v));
            }
        }
        let mut g = vec![0.0; m * m];
        for (&(b, r, c), list) in &by_pos {
            // tr(A_i A_j) = Σ A_i[r,c] A_j[c,r]
            if let Some(mirror) = by_pos.get(&(b, c, r)) {
                for &(i, v) in list {
                    for &(j, w) in mirror {
                        g[i * m + j] += (v * w).re;
                    }
                }
            }
        }
        g
    }

    fn dependence_check(&self) -> Result<Option<Vec<f64>>> {
        let m = self.constraints.len();
        if m == 0 {
            return Ok(None);
        }
        let gram = self.constraint_gram();
        let (rank, perm) = pivoted_cholesky_rank(&gram, m, 1e-10);
        if rank == m {
            return Ok(None);
        }
        // Express each dependent constraint through the independent ones and
        // compare right-hand sides.
        let kept: Vec<usize> = perm[..rank].to_vec();
        let sub: Vec<f64> = kept
            .iter()
            .flat_map(|&i| kept.iter().map(move |&j| (i, j)))
            .map(|(i, j)| gram[i * m + j])
            .collect();
        let scale = self.rhs.iter().map(|b| b.abs()).fold(1.0, f64::max);
        for &k in &perm[rank..] {
            let rhs_vec: Vec<f64> = kept.iter().map(|&i| gram[i * m + k]).collect();
            let coeffs = super::dense::solve_spd(&sub, rank, &rhs_vec).ok_or(Error::DependentConstraints)?;
            let predicted: f64 = kept.iter().zip(&coeffs).map(|(&i, c)| c * self.rhs[i]).sum();
            let mismatch = self.rhs[k] - predicted;
            if mismatch.abs() > 1e-9 * scale {
                // y_k A_k − Σ c_i y_k A_i = 0 with bᵀy = y_k · mismatch > 0
                let mut ray = vec![0.0; m];
                let sign = mismatch.signum();
                ray[k] = sign;
                for (&i, c) in kept.iter().zip(&coeffs) {
                    ray[i] = -sign * c;
                }
                return Ok(Some(ray));
            }
        }
        Err(Error::DependentConstraints)
    }
}

/// JSON debugging form: every matrix dense, same schema as matrix-core.
#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SdpProblemDump {
    pub block_dims: Vec<usize>,
    pub objective: Vec<ComplexMatrix>,
    pub constraints: Vec<ConstraintDump>,
}

#[derive(Serialize, Deserialize)]
pub struct ConstraintDump {
    pub blocks: Vec<ComplexMatrix>,
    pub rhs: f64,
}

impl From<&SdpProblem> for SdpProblemDump {
    fn from(p: &SdpProblem) -> Self {
        Self {
            block_dims: p.block_dims.clone(),
            objective: p.objective.clone(),
            constraints: p
                .constraints
                .iter()
                .zip(&p.rhs)
                .map(|(a, &rhs)| ConstraintDump {
                    blocks: a.to_dense(&p.block_dims),
                    rhs,
                })
                .collect(),
        }
    }
}

impl TryFrom<SdpProblemDump> for SdpProblem {
    type Error = Error;

    fn try_from(d: SdpProblemDump) -> Result<Self> {
        let cons = d
            .constraints
            .into_iter()
            .map(|c| (SparseHermitian::from_dense_blocks(&c.blocks), c.rhs))
            .collect();
        SdpProblem::new(d.block_dims, d.objective, cons)
    }
}
