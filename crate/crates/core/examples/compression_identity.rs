//! Compressing `T ↦ Σ R_i T S_i` to the block diagonal gives the Schur
//! multiplier of the diagonal parts of the families.

use opspace::matrix::BlockMatrix;
use opspace::schur::{diagonal_compression_identity_check, schur_compression, two_sided_map, SchurSymbol};
use rand::SeedableRng;

fn main() -> opspace::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let left: Vec<_> = (0..3).map(|_| BlockMatrix::random(4, 2, &mut rng)).collect();
    let right: Vec<_> = (0..3).map(|_| BlockMatrix::random(4, 2, &mut rng)).collect();

    let psi = two_sided_map(left.clone(), right.clone())?;
    let symbol = schur_compression(&psi)?;
    println!(
        "compression of a 3-term two-sided map on 4 x 4 blocks of M_2: grid {}",
        symbol.grid_size()
    );

    let report = diagonal_compression_identity_check(&left, &right, 5, 0)?;
    println!(
        "symbol residual {:.2e}, action residual {:.2e} over {} trials",
        report.symbol_residual, report.action_residual, report.trials
    );

    let phi = SchurSymbol::random(3, 2, 2, &mut rng);
    println!(
        "symbol -> compression -> symbol: {:.2e}",
        schur_compression(&phi)?.max_diff(&phi)
    );
    Ok(())
}
