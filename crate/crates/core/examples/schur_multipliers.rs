//! Schur multipliers with scalar and map-valued symbols.

use opspace::matrix::{BlockMatrix, ComplexMatrix};
use opspace::schur::{apply_symbol, multiplier_norm, scalar_factorization, SchurSymbol};
use rand::SeedableRng;

fn main() -> opspace::Result<()> {
    let hadamard = SchurSymbol::from_scalar(&ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, -1.0])?, 1)?;
    let r = multiplier_norm(&hadamard, 1e-9)?;
    println!(
        "Hadamard symbol: cb = {:.8}, norm >= {:.8} ({:?})",
        r.cb, r.norm_lb, r.method
    );

    let f = scalar_factorization(&hadamard, 1e-9)?;
    println!(
        "  factorization: max|y| max|x| = {:.8}, residual {:.1e}",
        f.value, f.residual
    );
    let norm = |v: &[opspace::matrix::C64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let ys: Vec<_> = f.y.iter().map(|y| norm(y)).collect();
    let xs: Vec<_> = f.x.iter().map(|x| norm(x)).collect();
    println!("  |y_i| = {ys:.6?}, |x_j| = {xs:.6?}");

    // Entry (n, m) acts on block (m, n).
    let phi = SchurSymbol::from_scalar(&ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0])?, 2)?;
    let t = BlockMatrix::identity(2, 2);
    let out = apply_symbol(&phi, &t)?;
    println!(
        "[[1,2],[3,4]] on the identity: diagonal blocks scaled by {} and {}",
        out.block(0, 0)[(0, 0)].re,
        out.block(1, 1)[(0, 0)].re
    );

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
    let general = SchurSymbol::random(2, 2, 2, &mut rng);
    let r = multiplier_norm(&general, 1e-8)?;
    println!(
        "random map-valued symbol, N = 2, d = 2: cb = {:.6}, norm >= {:.6} ({:?})",
        r.cb, r.norm_lb, r.method
    );
    Ok(())
}
