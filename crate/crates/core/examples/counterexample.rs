//! A direct sum of weighted transposes: block norms decay like 1/k while
//! block cb norms stay at 1.

use opspace::schur::counterexample_report;

fn main() -> opspace::Result<()> {
    let rows = counterexample_report(6, |k| 1.0 / k as f64, 1e-9, 16, 0)?;
    println!("{:>3} {:>10} {:>12} {:>12}", "k", "alpha", "blockNorm", "blockCb");
    for r in &rows {
        println!(
            "{:>3} {:>10.6} {:>12.8} {:>12.8}",
            r.k, r.alpha, r.block_norm, r.block_cb
        );
    }
    Ok(())
}
