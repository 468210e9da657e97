//! Local search for an attaining representation: minimise
//! `log‖Σ c_k* c_k‖ + log‖Σ d_k d_k*‖` over `c = a·F`, `d = F⁻¹·b` with
//! `F = exp(H/2)`, `H` Hermitian.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::tensor::{col_norm, minimal_length, row_norm, HaagerupTensor};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};

pub const FACTORIZED_RESTARTS: usize = 8;
const TEMPERATURES: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FactorizedNorm {
    /// `row_norm · col_norm` of `transformed_tensor`, an upper bound for `‖v‖_h`.
    pub value: f64,
    pub transformed_tensor: HaagerupTensor,
    /// Whether the best run met its stopping rule before the iteration cap.
    pub converged: bool,
    pub tol: f64,
}

/// `‖v‖_h` from above by optimising over invertible changes of
/// representation, after reduction to minimal length. `iters` bounds the
/// quasi-Newton steps per smoothing temperature.
pub fn haagerup_norm_factorized(v: &HaagerupTensor, iters: usize, tol: f64) -> Result<FactorizedNorm> {
    if v.is_empty() {
        return Err(Error::InvalidArgument("factorization needs at least one term".into()));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} outside (0, 1)")));
    }
    let w = minimal_length(v);
    if w.is_empty() {
        return Ok(FactorizedNorm {
            value: 0.0,
            transformed_tensor: w,
            converged: true,
            tol,
        });
    }
    let obj = Objective::new(&w);
    let n = obj.r * obj.r;
    let runs: Vec<(Vec<f64>, bool)> = (0..FACTORIZED_RESTARTS)
        .into_par_iter()
        .map(|k| {
            let mut x = vec![0.0; n];
            if k > 0 {
                let mut rng = ChaCha8Rng::seed_from_u64(0);
                rng.set_stream(k as u64);
                let h = ComplexMatrix::random_hermitian(obj.r, &mut rng).scale_real(0.5);
                x = hermitian_to_params(&h);
            }
            let mut converged = false;
            for &tau in &TEMPERATURES {
                let (xn, ok) = bfgs(|p| obj.eval(p, tau), x, iters, tol);
                x = xn;
                converged = ok;
            }
            (x, converged)
        })
        .collect();

    let mut best: Option<(f64, HaagerupTensor, bool)> = None;
    for (x, converged) in runs {
        let f = exp_half(&params_to_hermitian(&x, obj.r));
        let t = w.transform(&f)?;
        let value = row_norm(&t) * col_norm(&t);
        if best.as_ref().is_none_or(|b| value < b.0) {
            best = Some((value, t, converged));
        }
    }
    let (value, transformed_tensor, converged) = best.expect("at least one restart");
    Ok(FactorizedNorm {
        value,
        transformed_tensor,
        converged,
        tol,
    })
}

fn exp_half(h: &ComplexMatrix) -> ComplexMatrix {
    let e = h.hermitian_eigen();
    spectral(
        &e.vectors,
        &e.values.iter().map(|l| (0.5 * l).exp()).collect::<Vec<_>>(),
    )
}

/// `U diag(f) U*`.
fn spectral(u: &ComplexMatrix, f: &[f64]) -> ComplexMatrix {
    let scaled = ComplexMatrix::from_fn(u.rows(), u.cols(), |i, j| u[(i, j)] * f[j]);
    &scaled * &u.adjoint()
}

fn hermitian_to_params(h: &ComplexMatrix) -> Vec<f64> {
    let r = h.rows();
    let mut x = Vec::with_capacity(r * r);
    for k in 0..r {
        x.push(h[(k, k)].re);
    }
    for p in 0..r {
        for q in p + 1..r {
            x.push(h[(p, q)].re);
            x.push(h[(p, q)].im);
        }
    }
    x
}

fn params_to_hermitian(x: &[f64], r: usize) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(r, r);
    for k in 0..r {
        h[(k, k)] = C64::new(x[k], 0.0);
    }
    let mut idx = r;
    for p in 0..r {
        for q in p + 1..r {
            let z = C64::new(x[idx], x[idx + 1]);
            h[(p, q)] = z;
            h[(q, p)] = z.conj();
            idx += 2;
        }
    }
    h
}

/// Gradient of `Re tr(dH G)` in parameter coordinates.
fn gradient_to_params(g: &ComplexMatrix) -> Vec<f64> {
    let r = g.rows();
    let mut x = Vec::with_capacity(r * r);
    for k in 0..r {
        x.push(g[(k, k)].re);
    }
    for p in 0..r {
        for q in p + 1..r {
            x.push(2.0 * g[(q, p)].re);
            x.push(-2.0 * g[(q, p)].im);
        }
    }
    x
}

/// `τ log Σ exp(log μ_i / τ)` over the positive eigenvalues of `p`, and its
/// gradient `Σ w_i u_i u_i* / μ_i`.
fn smoothed_log_max(p: &ComplexMatrix, tau: f64) -> (f64, ComplexMatrix) {
    let e = p.hermitian_eigen();
    let top = *e.values.last().expect("nonempty");
    if !(top > 0.0) {
        return (f64::NEG_INFINITY, ComplexMatrix::zeros(p.rows(), p.cols()));
    }
    let lmax = top.ln();
    let weights: Vec<f64> = e
        .values
        .iter()
        .map(|&mu| if mu > 0.0 { ((mu.ln() - lmax) / tau).exp() } else { 0.0 })
        .collect();
    let z: f64 = weights.iter().sum();
    let value = lmax + tau * z.ln();
    let coeffs: Vec<f64> = weights
        .iter()
        .zip(&e.values)
        .map(|(w, &mu)| if *w > 0.0 { w / (z * mu) } else { 0.0 })
        .collect();
    (value, spectral(&e.vectors, &coeffs))
}

/// Fréchet derivative of `exp` at `U diag(λ) U*`, applied to `e`.
fn exp_derivative(u: &ComplexMatrix, lambda: &[f64], e: &ComplexMatrix) -> ComplexMatrix {
    let inner = &(&u.adjoint() * e) * u;
    let scaled = ComplexMatrix::from_fn(inner.rows(), inner.cols(), |p, q| {
        let delta = lambda[p] - lambda[q];
        let div = if delta.abs() < 1e-12 {
            1.0 + 0.5 * delta
        } else {
            delta.exp_m1() / delta
        };
        inner[(p, q)] * (lambda[q].exp() * div)
    });
    &(u * &scaled) * &u.adjoint()
}

struct Objective {
    r: usize,
    /// `a_i* a_j`, indexed `i * r + j`.
    row_products: Vec<ComplexMatrix>,
    /// `b_i b_j*`, indexed `i * r + j`.
    col_products: Vec<ComplexMatrix>,
}

impl Objective {
    fn new(w: &HaagerupTensor) -> Self {
        let r = w.len();
        let mut row_products = Vec::with_capacity(r * r);
        let mut col_products = Vec::with_capacity(r * r);
        for i in 0..r {
            for j in 0..r {
                row_products.push(w.rows()[i].adjoint_mul(&w.rows()[j]));
                col_products.push(&w.cols()[i] * &w.cols()[j].adjoint());
            }
        }
        Self {
            r,
            row_products,
            col_products,
        }
    }

    /// `Σ_ij M_ji X_ij`.
    fn gram(&self, m: &ComplexMatrix, products: &[ComplexMatrix]) -> ComplexMatrix {
        let d = products[0].rows();
        let mut g = ComplexMatrix::zeros(d, d);
        for i in 0..self.r {
            for j in 0..self.r {
                g += &products[i * self.r + j].scale(m[(j, i)]);
            }
        }
        g.hermitian_part()
    }

    /// `S_ij = tr(G X_ij)`.
    fn pullback(&self, g: &ComplexMatrix, products: &[ComplexMatrix]) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.r, self.r, |i, j| g.inner(&products[i * self.r + j])).hermitian_part()
    }

    fn eval(&self, x: &[f64], tau: f64) -> (f64, Vec<f64>) {
        let h = params_to_hermitian(x, self.r);
        let e = h.hermitian_eigen();
        let pos: Vec<f64> = e.values.clone();
        let neg: Vec<f64> = e.values.iter().map(|l| -l).collect();
        let m = spectral(&e.vectors, &pos.iter().map(|l| l.exp()).collect::<Vec<_>>());
        let k = spectral(&e.vectors, &neg.iter().map(|l| l.exp()).collect::<Vec<_>>());
        let (fp, gp) = smoothed_log_max(&self.gram(&m, &self.row_products), tau);
        let (fq, gq) = smoothed_log_max(&self.gram(&k, &self.col_products), tau);
        let s = self.pullback(&gp, &self.row_products);
        let t = self.pullback(&gq, &self.col_products);
        let grad = &exp_derivative(&e.vectors, &pos, &s) - &exp_derivative(&e.vectors, &neg, &t);
        (fp + fq, gradient_to_params(&grad))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Quasi-Newton minimisation with Armijo backtracking. Returns the final
/// point and whether the stopping rule fired before `max_iter`.
fn bfgs(f: impl Fn(&[f64]) -> (f64, Vec<f64>), mut x: Vec<f64>, max_iter: usize, tol: f64) -> (Vec<f64>, bool) {
    const MAX_STEP: f64 = 2.0;
    let n = x.len();
    let identity = |n: usize| {
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            h[i * n + i] = 1.0;
        }
        h
    };
    let mut hinv = identity(n);
    let (mut fx, mut g) = f(&x);
    let mut stalls = 0;
    for _ in 0..max_iter {
        if dot(&g, &g).sqrt() <= tol * 1e-3 {
            return (x, true);
        }
        let mut p: Vec<f64> = (0..n).map(|i| -dot(&hinv[i * n..(i + 1) * n], &g)).collect();
        if dot(&p, &g) >= 0.0 {
            hinv = identity(n);
            p = g.iter().map(|v| -v).collect();
        }
        let pn = dot(&p, &p).sqrt();
        if pn > MAX_STEP {
            p.iter_mut().for_each(|v| *v *= MAX_STEP / pn);
        }
        let slope = dot(&p, &g);
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let xn: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + alpha * b).collect();
            let (fnew, gnew) = f(&xn);
            if fnew.is_finite() && fnew <= fx + 1e-4 * alpha * slope {
                accepted = Some((xn, fnew, gnew));
                break;
            }
            alpha *= 0.5;
        }
        let Some((xn, fnew, gnew)) = accepted else {
            return (x, true);
        };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-14 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            // H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ
            let rho = 1.0 / sy;
            let hy: Vec<f64> = (0..n).map(|i| dot(&hinv[i * n..(i + 1) * n], &y)).collect();
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    hinv[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
        }
        let decrease = fx - fnew;
        x = xn;
        fx = fnew;
        g = gnew;
        if decrease <= tol * 1e-3 * (1.0 + fx.abs()) {
            stalls += 1;
            if stalls >= 3 {
                return (x, true);
            }
        } else {
            stalls = 0;
        }
    }
    (x, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = minimal_length(&HaagerupTensor::random(2, 3, &mut rng));
        let obj = Objective::new(&v);
        let h = ComplexMatrix::random_hermitian(obj.r, &mut rng).scale_real(0.3);
        let x = hermitian_to_params(&h);
        let tau = 0.5;
        let (_, g) = obj.eval(&x, tau);
        for i in 0..x.len() {
            let eps = 1e-6;
            let mut xp = x.clone();
            xp[i] += eps;
            let mut xm = x.clone();
            xm[i] -= eps;
            let fd = (obj.eval(&xp, tau).0 - obj.eval(&xm, tau).0) / (2.0 * eps);
            assert!(
                (fd - g[i]).abs() < 1e-6 * (1.0 + fd.abs()),
                "coord {i}: {fd} vs {}",
                g[i]
            );
        }
    }

    #[test]
    fn bfgs_minimises_a_quadratic() {
        let (x, ok) = bfgs(
            |x| {
                (
                    (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 2.0).powi(2),
                    vec![2.0 * (x[0] - 1.0), 20.0 * (x[1] + 2.0)],
                )
            },
            vec![0.0, 0.0],
            200,
            1e-10,
        );
        assert!(ok);
        assert!((x[0] - 1.0).abs() < 1e-6 && (x[1] + 2.0).abs() < 1e-6, "{x:?}");
    }
}
