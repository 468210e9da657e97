use rayon::prelude::*;
use serde::Serialize;

use super::symbol::{apply_symbol, SchurSymbol};
use crate::cbmaps::{cb_norm, cb_norm_detailed, norm_lower, LinearMatrixMap, DEFAULT_RESTARTS};
use crate::error::{Error, Result};
use crate::matrix::{vec_norm, BlockMatrix, ComplexMatrix, C64, ONE};
use crate::sdp::{self, SdpOptions, SdpProblem, SdpStatus, SparseHermitian};

/// How the cb value of a multiplier was certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMethod {
    /// `N = 0`, `d = 0` or every entry zero.
    Trivial,
    /// The two-block factorization program for scalar symbols.
    ScalarSdp,
    /// The cb-norm program of the assembled map on `M_{Nd}`.
    AssembledSdp,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MultiplierNorm {
    pub cb: f64,
    pub norm_lb: f64,
    pub method: NormMethod,
    pub status: SdpStatus,
    pub iterations: usize,
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
}

/// `‖S_φ‖_cb` within `tol` and an ascent lower bound for `‖S_φ‖`, with
/// default restarts and seed.
pub fn multiplier_norm(phi: &SchurSymbol, tol: f64) -> Result<MultiplierNorm> {
    multiplier_norm_with(phi, tol, DEFAULT_RESTARTS, 0)
}

pub fn multiplier_norm_with(phi: &SchurSymbol, tol: f64, restarts: usize, seed: u64) -> Result<MultiplierNorm> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} outside (0, 1)")));
    }
    let trivial = MultiplierNorm {
        cb: 0.0,
        norm_lb: 0.0,
        method: NormMethod::Trivial,
        status: SdpStatus::Optimal,
        iterations: 0,
        tol,
        restarts,
        seed,
    };
    if phi.grid_size() == 0 || phi.block_dim() == 0 {
        return Ok(trivial);
    }
    let out = if let Some(values) = phi.scalar_values() {
        if values.max_abs() == 0.0 {
            return Ok(trivial);
        }
        let sdp = scalar_sdp(values, tol)?;
        // X ⊗ E_11 is a contraction with the same image norm, so the N x N
        // scalar multiplier gives a valid lower bound at block size d.
        let small = SchurSymbol::from_scalar(values, 1)?.assembled_map();
        MultiplierNorm {
            cb: sdp.value,
            norm_lb: norm_lower(&small, restarts, seed),
            method: NormMethod::ScalarSdp,
            status: sdp.status,
            iterations: sdp.iterations,
            ..trivial
        }
    } else {
        let map = phi.assembled_map();
        if map.is_zero() {
            return Ok(trivial);
        }
        let rep = cb_norm_detailed(&map, tol)?;
        MultiplierNorm {
            cb: rep.value,
            norm_lb: norm_lower(&map, restarts, seed),
            method: NormMethod::AssembledSdp,
            status: rep.status,
            iterations: rep.iterations,
            ..trivial
        }
    };
    if out.norm_lb > out.cb + tol * (1.0 + out.cb) {
        return Err(Error::SolverFailure(format!(
            "ascent value {} exceeds the certified cb value {}",
            out.norm_lb, out.cb
        )));
    }
    Ok(out)
}

pub(crate) struct ScalarSdp {
    pub value: f64,
    /// `[[P, φ], [φ*, Q]]` at the optimum, for the unscaled `φ`.
    pub certificate: ComplexMatrix,
    pub status: SdpStatus,
    pub iterations: usize,
}

/// `min t  s.t.  [[P, φ], [φ*, Q]] ⪰ 0,  P_ii ≤ t,  Q_jj ≤ t`. Its value is
/// the multiplier norm of the scalar symbol `φ`.
pub(crate) fn scalar_sdp(phi: &ComplexMatrix, tol: f64) -> Result<ScalarSdp> {
    let n = phi.rows();
    let scale = phi.max_abs();
    let phi_s = phi.scale_real(1.0 / scale);
    // blocks: the 2N coupling block, then 2N scalar blocks t − P_ii, t − Q_jj
    let mut dims = vec![2 * n];
    dims.extend(std::iter::repeat_n(1, 2 * n));
    let mut c0 = ComplexMatrix::zeros(2 * n, 2 * n);
    c0.set_submatrix(0, n, &phi_s);
    c0.set_submatrix(n, 0, &phi_s.adjoint());
    let mut objective = vec![c0];
    objective.extend(std::iter::repeat_n(ComplexMatrix::zeros(1, 1), 2 * n));

    let mut constraints = Vec::with_capacity(2 * n * n + 1);
    for offset in [0, n] {
        for p in 0..n {
            for q in p..n {
                let coords: &[C64] = if p == q { &[ONE] } else { &[ONE, crate::matrix::I] };
                for &h in coords {
                    let mut a = SparseHermitian::new();
                    a.push(0, offset + p, offset + q, -h);
                    if p == q {
                        a.push(1 + offset + p, 0, 0, ONE);
                    }
                    constraints.push((a, 0.0));
                }
            }
        }
    }
    let mut t = SparseHermitian::new();
    for k in 0..2 * n {
        t.push(1 + k, 0, 0, -ONE);
    }
    constraints.push((t, -1.0));
    let problem = SdpProblem::new(dims, objective, constraints)?;
    let sol = sdp::solve(&problem, SdpOptions { tol, max_iter: 200 });
    if sol.status != SdpStatus::Optimal {
        return Err(Error::SolverFailure(format!(
            "multiplier SDP ended with {:?} after {} iterations (gap {:.2e})",
            sol.status, sol.iterations, sol.gap
        )));
    }
    let value = -0.5 * (sol.primal_obj + sol.dual_obj) * scale;
    let mut certificate = sol.z[0].scale_real(scale);
    certificate.set_submatrix(0, n, phi);
    certificate.set_submatrix(n, 0, &phi.adjoint());
    Ok(ScalarSdp {
        value: value.max(0.0),
        certificate,
        status: sol.status,
        iterations: sol.iterations,
    })
}

/// Vectors with `⟨x_j, y_i⟩ = φ_ij` (inner product conjugate-linear in the
/// first slot) and `value = maxᵢ‖y_i‖ · maxⱼ‖x_j‖`.
#[derive(Clone, Debug, Serialize)]
pub struct ScalarFactorization {
    pub x: Vec<Vec<C64>>,
    pub y: Vec<Vec<C64>>,
    pub value: f64,
    pub cb: f64,
    pub residual: f64,
    pub tol: f64,
}

/// Factorization `φ_ij = ⟨x_j, y_i⟩` read off a Cholesky factor of the
/// multiplier SDP certificate, balanced so `maxᵢ‖y_i‖ = maxⱼ‖x_j‖`.
pub fn scalar_factorization(phi: &SchurSymbol, tol: f64) -> Result<ScalarFactorization> {
    let values = phi.scalar_values().ok_or(Error::ScalarOnly)?;
    let n = values.rows();
    if n == 0 || values.max_abs() == 0.0 {
        let e = vec![C64::new(0.0, 0.0)];
        return Ok(ScalarFactorization {
            x: vec![e.clone(); n],
            y: vec![e; n],
            value: 0.0,
            cb: 0.0,
            residual: 0.0,
            tol,
        });
    }
    let sdp = scalar_sdp(values, tol)?;
    let mut cert = sdp.certificate.hermitian_part();
    // The φ block is exact; a tiny diagonal shift absorbs the dual residual.
    let lmin = cert.min_eigenvalue();
    let shift = (-lmin).max(0.0) * 2.0 + 1e-14 * cert.max_abs();
    for k in 0..2 * n {
        cert[(k, k)] += shift;
    }
    let l = cert
        .psd_cholesky(1e-12)?
        .ok_or_else(|| Error::SolverFailure("multiplier certificate is not PSD".into()))?;
    let mut y: Vec<Vec<C64>> = (0..n).map(|i| l.row(i).to_vec()).collect();
    let mut x: Vec<Vec<C64>> = (0..n).map(|j| l.row(n + j).to_vec()).collect();
    let top = |v: &[Vec<C64>]| v.iter().map(|u| vec_norm(u)).fold(0.0, f64::max);
    let (ny, nx) = (top(&y), top(&x));
    if ny > 0.0 && nx > 0.0 {
        let c = (nx / ny).sqrt();
        y.iter_mut().flatten().for_each(|z| *z *= c);
        x.iter_mut().flatten().for_each(|z| *z /= c);
    }
    let mut residual: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let ip = crate::matrix::vec_inner(&x[j], &y[i]);
            residual = residual.max((ip - values[(i, j)]).norm());
        }
    }
    Ok(ScalarFactorization {
        value: top(&y) * top(&x),
        x,
        y,
        cb: sdp.value,
        residual,
        tol,
    })
}

/// The symbol with every entry `(p, q)` zeroed unless `p ≥ n` and `q ≥ n`
/// (0-based), i.e. the trailing `(N − n) x (N − n)` sub-grid.
pub fn tail_symbol(phi: &SchurSymbol, n: usize) -> SchurSymbol {
    let d = phi.block_dim();
    phi.map_entries(|p, q, e| {
        if p >= n && q >= n {
            e.clone()
        } else {
            LinearMatrixMap::zero(d, d)
        }
    })
}

/// The symbol with only the leading `n x n` corner zeroed.
pub fn corner_zeroed_symbol(phi: &SchurSymbol, n: usize) -> SchurSymbol {
    let d = phi.block_dim();
    phi.map_entries(|p, q, e| {
        if p < n && q < n {
            LinearMatrixMap::zero(d, d)
        } else {
            e.clone()
        }
    })
}

/// Multiplier norm of [`tail_symbol`].
pub fn tail_multiplier_norm(phi: &SchurSymbol, n: usize, tol: f64) -> Result<f64> {
    check_tail_index(phi, n)?;
    Ok(multiplier_norm_with(&tail_symbol(phi, n), tol, 1, 0)?.cb)
}

/// Multiplier norm of [`corner_zeroed_symbol`].
pub fn corner_tail_multiplier_norm(phi: &SchurSymbol, n: usize, tol: f64) -> Result<f64> {
    check_tail_index(phi, n)?;
    Ok(multiplier_norm_with(&corner_zeroed_symbol(phi, n), tol, 1, 0)?.cb)
}

fn check_tail_index(phi: &SchurSymbol, n: usize) -> Result<()> {
    if n > phi.grid_size() {
        return Err(Error::InvalidArgument(format!(
            "tail index {n} beyond grid size {}",
            phi.grid_size()
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TailRow {
    pub n: usize,
    pub tail: f64,
    pub corner_tail: f64,
}

/// Both tail profiles for `n = 0..=N`.
pub fn tail_report(phi: &SchurSymbol, tol: f64) -> Result<Vec<TailRow>> {
    (0..=phi.grid_size())
        .into_par_iter()
        .map(|n| {
            Ok(TailRow {
                n,
                tail: tail_multiplier_norm(phi, n, tol)?,
                corner_tail: corner_tail_multiplier_norm(phi, n, tol)?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CounterexampleRow {
    pub k: usize,
    pub alpha: f64,
    pub block_norm: f64,
    pub block_cb: f64,
    pub status: SdpStatus,
    pub tol: f64,
}

/// For `k = 1..=K`, the ascent norm and cb norm of `α_k ·` (transpose on `M_k`).
pub fn counterexample_report(
    k_max: usize,
    weights: impl Fn(usize) -> f64 + Sync,
    tol: f64,
    restarts: usize,
    seed: u64,
) -> Result<Vec<CounterexampleRow>> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    (1..=k_max)
        .map(|k| {
            let alpha = weights(k);
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "weight α_{k} = {alpha} is not positive"
                )));
            }
            let m = LinearMatrixMap::transpose(k).scale(C64::new(alpha, 0.0));
            let cb = cb_norm_detailed(&m, tol)?;
            Ok(CounterexampleRow {
                k,
                alpha,
                block_norm: norm_lower(&m, restarts, seed),
                block_cb: cb.value,
                status: cb.status,
                tol,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct KernelBoundReport {
    /// `‖T_k‖`, the operator norm of the flattened kernel.
    pub operator_norm: f64,
    /// `‖k‖₂`.
    pub hs_norm: f64,
    /// `‖k‖₂ − ‖T_k‖`.
    pub operator_margin: f64,
    /// `max_{mn} ‖φ(m,n)‖_cb`.
    pub entry_cb_max: f64,
    /// `‖φ·k‖₂`.
    pub image_hs_norm: f64,
    /// `entry_cb_max · ‖k‖₂ − ‖φ·k‖₂`.
    pub image_margin: f64,
    /// `max_{mn}` of the entry norm for Hilbert-Schmidt input and output.
    pub entry_hs_max: f64,
    /// `entry_hs_max · ‖k‖₂ − ‖φ·k‖₂`, never negative up to rounding.
    pub image_hs_margin: f64,
    pub tol: f64,
}

pub fn kernel_bound_check(kernel: &BlockMatrix, phi: &SchurSymbol, tol: f64) -> Result<KernelBoundReport> {
    let image = apply_symbol(phi, kernel)?;
    let n = phi.grid_size();
    let entries: Vec<&LinearMatrixMap> = (0..n * n).map(|k| phi.entry(k / n, k % n)).collect();
    let entry_cb: Vec<f64> = match phi.scalar_values() {
        Some(v) => v.as_slice().iter().map(|z| z.norm()).collect(),
        None => entries.par_iter().map(|e| cb_norm(e, tol)).collect::<Result<_>>()?,
    };
    let entry_cb_max = entry_cb.into_iter().fold(0.0, f64::max);
    let entry_hs_max = entries.iter().map(|e| e.hs_operator_norm()).fold(0.0, f64::max);
    let operator_norm = if kernel.grid_size() * kernel.block_dim() == 0 {
        0.0
    } else {
        kernel.operator_norm()
    };
    let hs_norm = kernel.hs_norm();
    let image_hs_norm = image.hs_norm();
    Ok(KernelBoundReport {
        operator_norm,
        hs_norm,
        operator_margin: hs_norm - operator_norm,
        entry_cb_max,
        image_hs_norm,
        image_margin: entry_cb_max * hs_norm - image_hs_norm,
        entry_hs_max,
        image_hs_margin: entry_hs_max * hs_norm - image_hs_norm,
        tol,
    })
}
