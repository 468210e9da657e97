//! The interior-point solver on two small programs: the largest eigenvalue
//! of a Hermitian matrix, and the same program after a JSON round trip.

use opspace::matrix::{ComplexMatrix, C64};
use opspace::sdp::{solve, SdpOptions, SdpProblem, SdpProblemDump, SparseHermitian};

fn main() -> opspace::Result<()> {
    // max ⟨A, X⟩ over density matrices X, written as min ⟨−A, X⟩ with tr X = 1.
    let a = ComplexMatrix::from_vec(
        2,
        2,
        vec![
            C64::new(2.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, -1.0),
            C64::new(-1.0, 0.0),
        ],
    )?;
    let mut trace = SparseHermitian::new();
    trace.push_identity(0, 2, 1.0);
    let problem = SdpProblem::new(vec![2], vec![-&a], vec![(trace, 1.0)])?;

    let sol = solve(&problem, SdpOptions::default());
    println!(
        "lambda_max = {:.10} (exact {:.10}), status {:?}, {} iterations, gap {:.1e}",
        -sol.primal_obj,
        a.max_eigenvalue(),
        sol.status,
        sol.iterations,
        sol.gap
    );
    for (k, it) in sol.history.iter().enumerate().take(4) {
        println!("  iterate {k}: primal {:+.6} dual {:+.6}", it.primal_obj, it.dual_obj);
    }

    let dump = serde_json::to_string(&SdpProblemDump::from(&problem)).expect("dump serializes");
    let back: SdpProblem = serde_json::from_str::<SdpProblemDump>(&dump)
        .expect("dump parses")
        .try_into()?;
    let again = solve(
        &back,
        SdpOptions {
            tol: 1e-10,
            max_iter: 100,
        },
    );
    println!("after JSON round trip at tol 1e-10: {:.12}", -again.primal_obj);
    Ok(())
}
