//! Tail multiplier norms: decaying for a diagonal symbol, flat for the
//! all-ones symbol, and what happens when only the leading corner is cut.

use opspace::matrix::{BlockMatrix, ComplexMatrix, ONE};
use opspace::schur::{kernel_bound_check, tail_report, SchurSymbol};
use rand::SeedableRng;

fn main() -> opspace::Result<()> {
    let n = 6;
    let harmonic = (1..=n).map(|k| 1.0 / k as f64).collect::<Vec<_>>();
    let diag = SchurSymbol::from_scalar(&ComplexMatrix::from_real_diag(&harmonic), 1)?;
    let ones = SchurSymbol::from_scalar(&ComplexMatrix::from_fn(n, n, |_, _| ONE), 1)?;

    for (name, phi) in [("diag(1/k)", &diag), ("all ones", &ones)] {
        println!("{name}:");
        for row in tail_report(phi, 1e-9)? {
            println!(
                "  n = {}: tail {:.6}  corner-only {:.6}",
                row.n, row.tail, row.corner_tail
            );
        }
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    let kernel = BlockMatrix::random(n, 1, &mut rng);
    let r = kernel_bound_check(&kernel, &diag, 1e-9)?;
    println!(
        "kernel bounds: ||T_k|| = {:.4} <= ||k||_2 = {:.4}; ||phi.k||_2 = {:.4}",
        r.operator_norm, r.hs_norm, r.image_hs_norm
    );
    Ok(())
}
