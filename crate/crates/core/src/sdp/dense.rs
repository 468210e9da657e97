//! Real symmetric dense kernels for the Schur-complement system.

use rayon::prelude::*;

/// In-place lower Cholesky of a row-major `n x n` SPD matrix. The strict
/// upper triangle is left untouched. Returns `false` on a non-positive pivot.
pub(crate) fn cholesky_in_place(a: &mut [f64], n: usize) -> bool {
    const PANEL: usize = 64;
    // Right-looking blocked variant: factor a panel of columns, then update
    // the trailing rows in parallel.
    let mut k0 = 0;
    while k0 < n {
        let k1 = (k0 + PANEL).min(n);
        // factor the panel rows k0..k1 against columns k0..k1
        for j in k0..k1 {
            let row_j = &a[j * n..(j + 1) * n];
            let d = row_j[j] - row_j[k0..j].iter().map(|x| x * x).sum::<f64>();
            if !(d > 0.0) {
                return false;
            }
            let djj = d.sqrt();
            a[j * n + j] = djj;
            for i in j + 1..k1 {
                let mut s = a[i * n + j];
                for k in k0..j {
                    s -= a[i * n + k] * a[j * n + k];
                }
                a[i * n + j] = s / djj;
            }
        }
        if k1 < n {
            let (top, bottom) = a.split_at_mut(k1 * n);
            let panel = &top[k0 * n..];
            // rows below the panel: solve for their panel columns
            bottom.par_chunks_mut(n).for_each(|row| {
                for j in k0..k1 {
                    let lj = &panel[(j - k0) * n..(j - k0) * n + n];
                    let mut s = row[j];
                    for k in k0..j {
                        s -= row[k] * lj[k];
                    }
                    row[j] = s / lj[j];
                }
            });
            // trailing update of the lower triangle
            let bottom_ro: Vec<f64> = bottom.chunks(n).flat_map(|r| r[k0..k1].iter().copied()).collect();
            let w = k1 - k0;
            bottom.par_chunks_mut(n).enumerate().for_each(|(ri, row)| {
                let li = &bottom_ro[ri * w..(ri + 1) * w];
                let i = k1 + ri;
                for j in k1..=i {
                    let lj = &bottom_ro[(j - k1) * w..(j - k1 + 1) * w];
                    let dot: f64 = li.iter().zip(lj).map(|(x, y)| x * y).sum();
                    row[j] -= dot;
                }
            });
        }
        k0 = k1;
    }
    true
}

/// Solves `L Lᵀ x = b` with the factor produced by [`cholesky_in_place`].
pub(crate) fn cholesky_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut x = b.to_vec();
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s -= l[i * n + k] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in i + 1..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    x
}

/// Solves an SPD system, `None` if it is not numerically positive definite.
pub(crate) fn solve_spd(a: &[f64], n: usize, b: &[f64]) -> Option<Vec<f64>> {
    let mut f = a.to_vec();
    if !cholesky_in_place(&mut f, n) {
        return None;
    }
    Some(cholesky_solve(&f, n, b))
}

/// Numerical rank of a PSD matrix by diagonally pivoted Cholesky with a
/// pivot cutoff relative to the largest diagonal. Returns the rank and the
/// pivot order (independent indices first).
pub(crate) fn pivoted_cholesky_rank(a: &[f64], n: usize, rel_tol: f64) -> (usize, Vec<usize>) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut diag: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let max_diag = diag.iter().copied().fold(0.0, f64::max);
    if max_diag <= 0.0 {
        return (0, perm);
    }
    // columns of L stored per pivot step: l[step][original index]
    let mut l: Vec<Vec<f64>> = Vec::new();
    for step in 0..n {
        let (best, &dmax) = perm[step..]
            .iter()
            .map(|&p| (p, &diag[p]))
            .max_by(|x, y| x.1.total_cmp(y.1))
            .unwrap();
        if dmax <= rel_tol * max_diag {
            return (step, perm);
        }
        let pos = perm.iter().position(|&p| p == best).unwrap();
        perm.swap(step, pos);
        let p = perm[step];
        let piv = dmax.sqrt();
        let mut col = vec![0.0; n];
        for &q in &perm[step + 1..] {
            let mut s = a[q * n + p];
            for prev in &l {
                s -= prev[q] * prev[p];
            }
            col[q] = s / piv;
            diag[q] -= col[q] * col[q];
        }
        col[p] = piv;
        l.push(col);
    }
    (n, perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = (0..n).map(|k| b[i * n + k] * b[j * n + k]).sum::<f64>();
            }
            a[i * n + i] += 0.1;
        }
        a
    }

    #[test]
    fn blocked_cholesky_solves_large_system() {
        let n = 150;
        let a = random_spd(n, 4);
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let b: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[i * n + j] * x_true[j]).sum()).collect();
        let x = solve_spd(&a, n, &b).unwrap();
        let err = x.iter().zip(&x_true).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn rank_detection() {
        // rank-2 Gram of three vectors with v3 = v1 + v2
        let v = [[1.0, 0.0, 2.0], [0.0, 1.0, 1.0], [1.0, 1.0, 3.0]];
        let mut g = vec![0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                g[i * 3 + j] = (0..3).map(|k| v[i][k] * v[j][k]).sum();
            }
        }
        assert_eq!(pivoted_cholesky_rank(&g, 3, 1e-10).0, 2);
        assert!(!cholesky_in_place(&mut g.clone(), 3));
    }
}
