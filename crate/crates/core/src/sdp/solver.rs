//! Infeasible-start primal-dual interior-point method with the HKM search
//! direction and Mehrotra predictor-corrector steps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dense::{cholesky_in_place, cholesky_solve};
use super::problem::SdpProblem;
use crate::matrix::{ComplexMatrix, C64, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SdpStatus {
    Optimal,
    MaxIter,
    Infeasible,
}

#[derive(Clone, Copy, Debug)]
pub struct SdpOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 200,
        }
    }
}

/// Objective values and residuals of one iterate.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IterateSummary {
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub complementarity: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SdpSolution {
    pub x: Vec<ComplexMatrix>,
    pub z: Vec<ComplexMatrix>,
    pub y: Vec<f64>,
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub status: SdpStatus,
    pub iterations: usize,
    #[serde(skip)]
    pub history: Vec<IterateSummary>,
}

type Blocks = Vec<ComplexMatrix>;

fn blocks_axpy(a: &mut Blocks, alpha: f64, b: &Blocks) {
    for (x, y) in a.iter_mut().zip(b) {
        for (p, q) in x.as_mut_slice().iter_mut().zip(y.as_slice()) {
            *p += q * alpha;
        }
    }
}

fn blocks_inner(a: &Blocks, b: &Blocks) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.inner(y).re).sum()
}

fn blocks_fro(a: &Blocks) -> f64 {
    a.iter().map(|x| x.frobenius_norm().powi(2)).sum::<f64>().sqrt()
}

fn blocks_sym(a: &mut Blocks) {
    for x in a.iter_mut() {
        *x = x.hermitian_part();
    }
}

/// Inverse of a Hermitian positive definite matrix through its Cholesky
/// factor; `None` if not numerically positive definite.
fn hpd_inverse(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let l = m.cholesky()?;
    let linv = lower_inverse(&l);
    Some(linv.adjoint_mul(&linv))
}

fn lower_inverse(l: &ComplexMatrix) -> ComplexMatrix {
    let n = l.rows();
    let mut inv = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = C64::new(1.0, 0.0) / l[(j, j)];
        for i in j + 1..n {
            let mut s = ZERO;
            for k in j..i {
                s += l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -s / l[(i, i)];
        }
    }
    inv
}

/// Largest `α` with `X + α ΔX ⪰ 0`, `f64::INFINITY` if unbounded.
fn max_step(x: &ComplexMatrix, dx: &ComplexMatrix) -> f64 {
    let l = match x.cholesky() {
        Some(l) => l,
        None => return 0.0,
    };
    let linv = lower_inverse(&l);
    let w = &(&linv * dx) * &linv.adjoint();
    let lmin = w.min_eigenvalue();
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

fn blocks_max_step(x: &Blocks, dx: &Blocks) -> f64 {
    x.iter()
        .zip(dx)
        .map(|(a, b)| max_step(a, b))
        .fold(f64::INFINITY, f64::min)
}

struct Workspace<'a> {
    p: &'a SdpProblem,
}

impl<'a> Workspace<'a> {
    /// `(Re⟨A_i, X⟩)_i`.
    fn apply_a(&self, x: &Blocks) -> Vec<f64> {
        self.p.constraints().iter().map(|a| a.trace_with(x)).collect()
    }

    /// `Σ y_i A_i`.
    fn apply_at(&self, y: &[f64]) -> Blocks {
        let mut out: Blocks = self
            .p
            .block_dims()
            .iter()
            .map(|&n| ComplexMatrix::zeros(n, n))
            .collect();
        for (a, &yi) in self.p.constraints().iter().zip(y) {
            if yi == 0.0 {
                continue;
            }
            for &(b, r, c, v) in a.entries() {
                out[b][(r, c)] += v * yi;
            }
        }
        out
    }

    /// Schur complement `M_ij = Re tr(A_i X A_j Z⁻¹)` as a dense row-major
    /// matrix (lower triangle filled; used symmetrically).
    fn schur(&self, x: &Blocks, zinv: &Blocks) -> Vec<f64> {
        let cons = self.p.constraints();
        let m = cons.len();
        let dims = self.p.block_dims();
        let mut out = vec![0.0; m * m];
        out.par_chunks_mut(m).enumerate().for_each(|(i, row)| {
            // G = Z⁻¹ A_i X restricted to the blocks A_i touches
            let mut g: Vec<Option<ComplexMatrix>> = vec![None; dims.len()];
            let mut by_block: Vec<Vec<(usize, usize, C64)>> = vec![Vec::new(); dims.len()];
            for &(b, r, c, v) in cons[i].entries() {
                by_block[b].push((r, c, v));
            }
            for (b, ents) in by_block.iter().enumerate() {
                if ents.is_empty() {
                    continue;
                }
                let n = dims[b];
                let (zb, xb) = (&zinv[b], &x[b]);
                let gb = if ents.len() > n {
                    let mut a = ComplexMatrix::zeros(n, n);
                    for &(r, c, v) in ents {
                        a[(r, c)] += v;
                    }
                    &(zb * &a) * xb
                } else {
                    let mut gm = ComplexMatrix::zeros(n, n);
                    for &(r, c, v) in ents {
                        // G += v Z⁻¹[:, r] X[c, :]
                        let xrow = xb.row(c).to_vec();
                        for p in 0..n {
                            let s = zb[(p, r)] * v;
                            if s == ZERO {
                                continue;
                            }
                            let grow = &mut gm.as_mut_slice()[p * n..(p + 1) * n];
                            for (gq, xq) in grow.iter_mut().zip(&xrow) {
                                *gq += s * xq;
                            }
                        }
                    }
                    gm
                };
                g[b] = Some(gb);
            }
            for j in 0..=i {
                let mut acc = 0.0;
                for &(b, r, c, v) in cons[j].entries() {
                    if let Some(gb) = &g[b] {
                        // tr(A_j G) = Σ A_j[r,c] G[c,r]
                        let w = gb[(c, r)];
                        acc += v.re * w.re - v.im * w.im;
                    }
                }
                row[j] = acc;
            }
        });
        for i in 0..m {
            for j in 0..i {
                out[j * m + i] = out[i * m + j];
            }
        }
        out
    }
}

/// Solves `p` to relative accuracy `opts.tol`.
///
/// Starts from `X = ξI, Z = ηI, y = 0` with `ξ, η` taken from the problem
/// scaling, so no feasible point needs to be supplied.
pub fn solve(p: &SdpProblem, opts: SdpOptions) -> SdpSolution {
    let dims = p.block_dims().to_vec();
    let m = p.num_constraints();
    let n_total: usize = dims.iter().sum();
    let b = p.rhs();
    let c = p.objective().to_vec();
    let ws = Workspace { p };

    if let Some(ray) = p.infeasibility_ray() {
        let eye: Blocks = dims.iter().map(|&n| ComplexMatrix::identity(n)).collect();
        return SdpSolution {
            x: eye.clone(),
            z: eye,
            y: ray.to_vec(),
            primal_obj: f64::NAN,
            dual_obj: f64::NAN,
            gap: f64::NAN,
            primal_residual: f64::NAN,
            dual_residual: f64::NAN,
            status: SdpStatus::Infeasible,
            iterations: 0,
            history: Vec::new(),
        };
    }

    let norm_b = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let norm_c = blocks_fro(&c);
    let a_norms: Vec<f64> = p.constraints().iter().map(|a| a.frobenius_norm()).collect();
    let sqrt_n = (n_total as f64).sqrt();
    let mut xi: f64 = 10.0f64.max(sqrt_n);
    let mut eta: f64 = 10.0f64.max(sqrt_n).max(norm_c);
    for (k, &an) in a_norms.iter().enumerate() {
        xi = xi.max(n_total as f64 * (1.0 + b[k].abs()) / (1.0 + an));
        eta = eta.max(an);
    }
    eta = eta.max((1.0 + norm_c) / sqrt_n);

    let mut x: Blocks = dims
        .iter()
        .map(|&n| ComplexMatrix::identity(n).scale_real(xi))
        .collect();
    let mut z: Blocks = dims
        .iter()
        .map(|&n| ComplexMatrix::identity(n).scale_real(eta))
        .collect();
    let mut y = vec![0.0; m];
    let mut history = Vec::new();
    let mut status = SdpStatus::MaxIter;
    let mut iterations = 0;

    let residuals = |x: &Blocks, y: &[f64], z: &Blocks| {
        let ax = ws.apply_a(x);
        let rp: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let aty = ws.apply_at(y);
        let rd: Blocks = c
            .iter()
            .zip(&aty)
            .zip(z)
            .map(|((ci, ai), zi)| &(ci - ai) - zi)
            .collect();
        (rp, rd)
    };

    for iter in 0..=opts.max_iter {
        let (rp, rd) = residuals(&x, &y, &z);
        let pobj = blocks_inner(&c, &x);
        let dobj: f64 = b.iter().zip(&y).map(|(bi, yi)| bi * yi).sum();
        let xz = blocks_inner(&x, &z);
        let pres = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + norm_b);
        let dres = blocks_fro(&rd) / (1.0 + norm_c);
        history.push(IterateSummary {
            primal_obj: pobj,
            dual_obj: dobj,
            primal_residual: pres,
            dual_residual: dres,
            complementarity: xz,
        });
        iterations = iter;

        if (pobj - dobj).abs() <= opts.tol * (1.0 + pobj.abs())
            && xz.abs() <= opts.tol * (1.0 + pobj.abs())
            && pres <= opts.tol
            && dres <= opts.tol
        {
            status = SdpStatus::Optimal;
            break;
        }
        // Infeasibility certificates: a dual ray with bᵀy → ∞ while
        // Σ y_i A_i + Z stays bounded, or a primal ray with ⟨C,X⟩ → −∞.
        if dobj > 0.0 {
            let ray = blocks_fro(&ws.apply_at(&y).iter().zip(&z).map(|(a, zz)| a + zz).collect()) / dobj;
            if ray < opts.tol && dobj > 1e6 * (1.0 + norm_c) {
                status = SdpStatus::Infeasible;
                break;
            }
        }
        if pobj < 0.0 {
            let ax = ws.apply_a(&x);
            let ray = ax.iter().map(|v| v * v).sum::<f64>().sqrt() / -pobj;
            if ray < opts.tol && -pobj > 1e6 * (1.0 + norm_b) {
                status = SdpStatus::Infeasible;
                break;
            }
        }
        if iter == opts.max_iter {
            break;
        }

        let zinv: Blocks = match z.iter().map(hpd_inverse).collect::<Option<Vec<_>>>() {
            Some(v) => v,
            None => break,
        };
        let mut schur = ws.schur(&x, &zinv);
        let mut factored = false;
        let max_diag = (0..m).map(|i| schur[i * m + i]).fold(0.0, f64::max).max(1e-300);
        for shift in [0.0, 1e-14, 1e-12, 1e-10, 1e-8] {
            let mut f = schur.clone();
            for i in 0..m {
                f[i * m + i] += shift * max_diag;
            }
            if cholesky_in_place(&mut f, m) {
                schur = f;
                factored = true;
                break;
            }
        }
        if !factored {
            break;
        }
        let mu = xz / n_total as f64;

        // X Rd Z⁻¹ enters every right-hand side
        let x_rd_zinv: Blocks = x
            .iter()
            .zip(&rd)
            .zip(&zinv)
            .map(|((xi, ri), zi)| &(xi * ri) * zi)
            .collect();
        let a_x_rd_zinv = ws.apply_a(&x_rd_zinv);

        let direction = |rc: &Blocks| -> (Blocks, Vec<f64>, Blocks) {
            let a_rc = ws.apply_a(rc);
            let rhs: Vec<f64> = (0..m).map(|i| rp[i] - a_rc[i] + a_x_rd_zinv[i]).collect();
            let dy = cholesky_solve(&schur, m, &rhs);
            let at_dy = ws.apply_at(&dy);
            let dz: Blocks = rd.iter().zip(&at_dy).map(|(r, a)| r - a).collect();
            let mut dx: Blocks = rc
                .iter()
                .zip(&x)
                .zip(&dz)
                .zip(&zinv)
                .map(|(((rc, xi), dzi), zi)| rc - &(&(xi * dzi) * zi))
                .collect();
            blocks_sym(&mut dx);
            (dx, dy, dz)
        };

        // predictor (affine scaling)
        let rc_aff: Blocks = x.iter().map(|xi| -xi).collect();
        let (dx_a, _dy_a, dz_a) = direction(&rc_aff);
        let ap = blocks_max_step(&x, &dx_a).min(1.0);
        let ad = blocks_max_step(&z, &dz_a).min(1.0);
        let mut x_try = x.clone();
        blocks_axpy(&mut x_try, ap, &dx_a);
        let mut z_try = z.clone();
        blocks_axpy(&mut z_try, ad, &dz_a);
        let ratio = (blocks_inner(&x_try, &z_try) / xz).max(0.0);
        let expon = 1f64.max(3.0 * ap.min(ad).powi(2));
        let sigma = ratio.powf(expon).min(1.0);

        // corrector
        let rc: Blocks = zinv
            .iter()
            .zip(&x)
            .zip(dx_a.iter().zip(&dz_a))
            .map(|((zi, xi), (dxa, dza))| {
                let mut r = zi.scale_real(sigma * mu);
                r -= xi;
                r -= &(&(dxa * dza) * zi);
                r
            })
            .collect();
        let (dx, dy, dz) = direction(&rc);
        let gamma = 0.9 + 0.09 * ap.min(ad);
        let step_p = (gamma * blocks_max_step(&x, &dx)).min(1.0);
        let step_d = (gamma * blocks_max_step(&z, &dz)).min(1.0);
        if step_p < 1e-12 && step_d < 1e-12 {
            break;
        }
        blocks_axpy(&mut x, step_p, &dx);
        blocks_axpy(&mut z, step_d, &dz);
        for (yi, d) in y.iter_mut().zip(&dy) {
            *yi += step_d * d;
        }
        blocks_sym(&mut x);
        blocks_sym(&mut z);
    }

    let last = *history.last().expect("at least one iterate");
    SdpSolution {
        x,
        z,
        y,
        primal_obj: last.primal_obj,
        dual_obj: last.dual_obj,
        gap: (last.primal_obj - last.dual_obj).abs(),
        primal_residual: last.primal_residual,
        dual_residual: last.dual_residual,
        status,
        iterations,
        history,
    }
}
