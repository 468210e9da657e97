//! Hermitian eigendecomposition, singular value decomposition and Cholesky
//! factorisation, all by Jacobi-type sweeps or direct elimination.

use super::dense::{ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
/// Squared column norms below this fraction of `‖M‖_F²` are treated as zero.
const NEGLIGIBLE: f64 = 1e-40;

/// Eigenvalues in ascending order with unit eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Thin SVD: `M = U diag(s) V*`, singular values descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

/// The unitary 2x2 rotation `[[c, s], [-s e^{-iθ}, c e^{-iθ}]]` that
/// diagonalises `[[a, b], [conj(b), d]]` for real `a, d`.
fn jacobi_rotation(a: f64, d: f64, b: C64) -> (f64, f64, C64) {
    let abs_b = b.norm();
    // normalise through the larger component so tiny `b` keeps |phase| = 1
    let big = b.re.abs().max(b.im.abs());
    let phase = if big > 0.0 {
        let u = b / big;
        (u / u.norm()).conj()
    } else {
        ONE
    };
    let tau = (d - a) / (2.0 * abs_b);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, phase)
}

/// Right-multiplies columns `p, q` of `m` by the rotation.
fn rotate_cols(m: &mut ComplexMatrix, p: usize, q: usize, c: f64, s: f64, phase: C64) {
    for i in 0..m.rows() {
        let xp = m[(i, p)];
        let xq = m[(i, q)] * phase;
        m[(i, p)] = xp * c - xq * s;
        m[(i, q)] = xp * s + xq * c;
    }
}

/// Left-multiplies rows `p, q` of `m` by the adjoint rotation.
fn rotate_rows(m: &mut ComplexMatrix, p: usize, q: usize, c: f64, s: f64, phase: C64) {
    let pc = phase.conj();
    for j in 0..m.cols() {
        let xp = m[(p, j)];
        let xq = m[(q, j)] * pc;
        m[(p, j)] = xp * c - xq * s;
        m[(q, j)] = xp * s + xq * c;
    }
}

impl ComplexMatrix {
    /// Cyclic Jacobi eigendecomposition of the Hermitian part.
    pub fn hermitian_eigen(&self) -> HermitianEigen {
        assert!(self.is_square(), "eigendecomposition of a non-square matrix");
        let n = self.rows();
        let mut a = self.hermitian_part();
        let mut v = ComplexMatrix::identity(n);
        let scale = a.frobenius_norm();
        if scale > 0.0 {
            for _ in 0..MAX_SWEEPS {
                let mut off = 0.0;
                for p in 0..n {
                    for q in p + 1..n {
                        off += a[(p, q)].norm_sqr();
                    }
                }
                if off.sqrt() <= 1e-15 * scale {
                    break;
                }
                for p in 0..n {
                    for q in p + 1..n {
                        let b = a[(p, q)];
                        if b.norm() <= 1e-20 * scale {
                            continue;
                        }
                        let (c, s, phase) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, b);
                        rotate_cols(&mut a, p, q, c, s, phase);
                        rotate_rows(&mut a, p, q, c, s, phase);
                        a[(p, q)] = ZERO;
                        a[(q, p)] = ZERO;
                        a[(p, p)].im = 0.0;
                        a[(q, q)].im = 0.0;
                        rotate_cols(&mut v, p, q, c, s, phase);
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
        HermitianEigen {
            values: order.iter().map(|&i| a[(i, i)].re).collect(),
            vectors: ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]),
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.hermitian_eigen().values.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.hermitian_eigen().values.last().copied().unwrap_or(0.0)
    }

    /// One-sided (Hestenes) Jacobi SVD. Implicitly diagonalises `M* M` by
    /// plane rotations applied to the columns of `M`.
    pub fn svd(&self) -> Svd {
        if self.rows() < self.cols() {
            let t = self.adjoint().svd();
            return Svd {
                u: t.v,
                singular_values: t.singular_values,
                v: t.u,
            };
        }
        let (m, n) = self.shape();
        let mut g = self.clone();
        let mut v = ComplexMatrix::identity(n);
        let total = g.frobenius_norm().powi(2);
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, ZERO);
                    for i in 0..m {
                        let (gp, gq) = (g[(i, p)], g[(i, q)]);
                        alpha += gp.norm_sqr();
                        beta += gq.norm_sqr();
                        gamma += gp.conj() * gq;
                    }
                    // square roots taken separately so αβ cannot underflow
                    if gamma.norm() <= 1e-15 * alpha.sqrt() * beta.sqrt() || alpha.min(beta) <= NEGLIGIBLE * total {
                        continue;
                    }
                    rotated = true;
                    let (c, s, phase) = jacobi_rotation(alpha, beta, gamma);
                    rotate_cols(&mut g, p, q, c, s, phase);
                    rotate_cols(&mut v, p, q, c, s, phase);
                }
            }
            if !rotated {
                break;
            }
        }
        let norms: Vec<f64> = (0..n)
            .map(|j| (0..m).map(|i| g[(i, j)].norm_sqr()).sum::<f64>().sqrt())
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
        let top = norms.iter().copied().fold(0.0, f64::max);
        let mut u = ComplexMatrix::zeros(m, n);
        for (k, &j) in order.iter().enumerate() {
            if norms[j] > 1e-300 && norms[j] > 1e-15 * top {
                for i in 0..m {
                    u[(i, k)] = g[(i, j)] / norms[j];
                }
            }
        }
        complete_orthonormal_columns(&mut u, &order.iter().map(|&j| norms[j]).collect::<Vec<_>>(), top);
        Svd {
            u,
            singular_values: order.iter().map(|&j| norms[j]).collect(),
            v: ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]),
        }
    }

    /// Lower-triangular `L` with `L L* = self` for Hermitian positive definite
    /// input; `None` when a pivot is not positive.
    pub fn cholesky(&self) -> Option<ComplexMatrix> {
        let n = self.rows();
        let mut l = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > 0.0) {
                return None;
            }
            let ljj = d.sqrt();
            l[(j, j)] = C64::new(ljj, 0.0);
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / ljj;
            }
        }
        Some(l)
    }

    /// Factor `L` with `L L* = self` for Hermitian positive semidefinite input.
    ///
    /// Returns the lower-triangular Cholesky factor when every pivot is
    /// positive; otherwise falls back to `V diag(sqrt(max(λ, 0)))` from the
    /// eigendecomposition. Fails iff the smallest eigenvalue is below
    /// `-tol * ‖self‖`.
    pub fn psd_cholesky(&self, tol: f64) -> Result<Option<ComplexMatrix>> {
        if self.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !self.is_square() {
            return Err(Error::DimensionMismatch("psd_cholesky needs a square matrix".into()));
        }
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let defect = self.hermitian_defect();
        if defect > tol * scale {
            return Err(Error::NotHermitian(defect));
        }
        let h = self.hermitian_part();
        let eig = h.hermitian_eigen();
        let norm = eig.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if eig.values[0] < -tol * norm {
            return Ok(None);
        }
        if eig.values[0] > tol * norm {
            if let Some(l) = h.cholesky() {
                return Ok(Some(l));
            }
        }
        let n = h.rows();
        Ok(Some(ComplexMatrix::from_fn(n, n, |i, j| {
            eig.vectors[(i, j)] * eig.values[j].max(0.0).sqrt()
        })))
    }
}

/// Fills zero columns of `u` (null singular directions) with an orthonormal
/// completion so that `u` always has orthonormal columns.
fn complete_orthonormal_columns(u: &mut ComplexMatrix, sv: &[f64], top: f64) {
    let (m, n) = u.shape();
    let mut filled: Vec<bool> = sv.iter().map(|&s| s > 1e-300 && s > 1e-15 * top).collect();
    for k in 0..n {
        if filled[k] {
            continue;
        }
        // best coordinate vector after two Gram-Schmidt passes
        let mut best: Option<(f64, Vec<C64>)> = None;
        for e in 0..m {
            let mut cand = vec![ZERO; m];
            cand[e] = ONE;
            for _ in 0..2 {
                for j in (0..n).filter(|&j| filled[j]) {
                    let proj: C64 = (0..m).map(|i| u[(i, j)].conj() * cand[i]).sum();
                    for i in 0..m {
                        cand[i] -= u[(i, j)] * proj;
                    }
                }
            }
            let nrm = super::dense::vec_norm(&cand);
            if best.as_ref().is_none_or(|b| nrm > b.0) {
                best = Some((nrm, cand));
            }
        }
        let (nrm, cand) = best.expect("m > 0");
        for i in 0..m {
            u[(i, k)] = cand[i] / nrm;
        }
        filled[k] = true;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn eigen_reconstructs_random_hermitian() {
        let mut r = rng(1);
        let a = ComplexMatrix::random_hermitian(7, &mut r);
        let e = a.hermitian_eigen();
        let lam = ComplexMatrix::from_real_diag(&e.values);
        let rec = &(&e.vectors * &lam) * &e.vectors.adjoint();
        assert!(rec.max_diff(&a) < 1e-12);
        assert!(e.vectors.adjoint_mul(&e.vectors).max_diff(&ComplexMatrix::identity(7)) < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn svd_reconstructs_rectangular() {
        let mut r = rng(2);
        for &(m, n) in &[(5, 3), (3, 5), (4, 4), (1, 6)] {
            let a = ComplexMatrix::random(m, n, &mut r);
            let s = a.svd();
            let k = m.min(n);
            assert_eq!(s.singular_values.len(), k);
            let sig = ComplexMatrix::from_real_diag(&s.singular_values);
            let rec = &(&s.u * &sig) * &s.v.adjoint();
            assert!(rec.max_diff(&a) < 1e-12, "{m}x{n}");
            assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn svd_of_rank_one_with_zero_rows_is_unitary() {
        // zero rows leave columns of norm ~1e-158 after rotation
        let c = |re: f64, im: f64| C64::new(re, im);
        let x = [
            c(0.3975, -0.7479),
            c(-0.8394, 0.7454),
            ZERO,
            c(-0.4686, 0.2329),
            c(0.1637, 0.8623),
            ZERO,
        ];
        let y = [
            c(0.1731, -0.4414),
            c(0.8838, -0.3056),
            c(-0.0359, 0.8799),
            c(-0.2423, 1.0033),
            c(-0.7461, 2.5607),
            c(0.3749, 0.1269),
        ];
        for w in [super::super::dense::outer(&x, &y), super::super::dense::outer(&y, &x)] {
            let s = w.svd();
            let id = ComplexMatrix::identity(6);
            assert!((&s.u.adjoint() * &s.u).max_diff(&id) < 1e-13);
            assert!((&s.v.adjoint() * &s.v).max_diff(&id) < 1e-13);
            let rebuilt = &ComplexMatrix::from_fn(6, 6, |i, k| s.u[(i, k)] * s.singular_values[k]) * &s.v.adjoint();
            assert!(rebuilt.max_diff(&w) < 1e-13);
        }
    }

    #[test]
    fn svd_of_rank_deficient_matrix_has_orthonormal_u() {
        let x = ComplexMatrix::from_real(3, 1, &[1.0, 2.0, 2.0]).unwrap();
        let a = &x * &x.adjoint();
        let s = a.svd();
        assert!((s.singular_values[0] - 9.0).abs() < 1e-12);
        assert!(s.singular_values[1] < 1e-12);
        assert!(s.u.adjoint_mul(&s.u).max_diff(&ComplexMatrix::identity(3)) < 1e-10);
    }

    #[test]
    fn cholesky_examples() {
        let l = ComplexMatrix::identity(2).psd_cholesky(1e-12).unwrap().unwrap();
        assert_eq!(l, ComplexMatrix::identity(2));
        let neg = ComplexMatrix::from_real(1, 1, &[-1.0]).unwrap();
        assert_eq!(neg.psd_cholesky(1e-12).unwrap(), None);
        let skew = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, -1.0, 0.0]).unwrap();
        assert!(matches!(skew.psd_cholesky(1e-12), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn psd_cholesky_handles_singular_gram() {
        let mut r = rng(5);
        let a = ComplexMatrix::random(5, 2, &mut r);
        let g = &a * &a.adjoint();
        let l = g.psd_cholesky(1e-10).unwrap().unwrap();
        assert!((&l * &l.adjoint()).max_diff(&g) < 1e-10 * g.norm());
    }
}
