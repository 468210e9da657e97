//! Haagerup tensor norms: the SDP value, the factorized upper bound and the
//! representation it finds.

use opspace::haagerup::{
    col_norm, haagerup_norm_factorized, haagerup_norm_sdp, minimal_length, row_norm, HaagerupTensor,
};
use rand::SeedableRng;

fn main() -> opspace::Result<()> {
    for n in 2..=3 {
        let v = HaagerupTensor::transpose_tensor(n);
        println!(
            "sum E_ij (x) E_ij on M_{n}: h = {:.6}, naive row * col = {:.6}",
            haagerup_norm_sdp(&v, 1e-9)?,
            row_norm(&v) * col_norm(&v)
        );
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let v = HaagerupTensor::random(3, 5, &mut rng);
    println!(
        "random tensor, d = 3, 5 terms (minimal length {})",
        minimal_length(&v).len()
    );
    println!("  given representation: {:.6}", row_norm(&v) * col_norm(&v));
    let sdp = haagerup_norm_sdp(&v, 1e-9)?;
    let fac = haagerup_norm_factorized(&v, 300, 1e-10)?;
    println!("  SDP:        {sdp:.8}");
    println!("  factorized: {:.8} (converged: {})", fac.value, fac.converged);
    let w = &fac.transformed_tensor;
    println!(
        "  balanced representation: row {:.6}, col {:.6}",
        row_norm(w),
        col_norm(w)
    );
    Ok(())
}
