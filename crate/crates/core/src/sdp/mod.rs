//! A self-contained primal-dual interior-point solver for small dense
//! complex semidefinite programs in standard form.

mod dense;
mod problem;
mod solver;

pub use problem::{ConstraintDump, SdpProblem, SdpProblemDump, SparseHermitian};
pub use solver::{solve, IterateSummary, SdpOptions, SdpSolution, SdpStatus};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{ComplexMatrix, C64};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// `min t  s.t.  tI − A ⪰ 0` written in standard form: the dual of
    /// `min ⟨−A, X⟩, tr X = 1`.
    fn eigenvalue_program(a: &ComplexMatrix, scale: f64) -> SdpProblem {
        let n = a.rows();
        let mut trace = SparseHermitian::new();
        trace.push_identity(0, n, -scale);
        SdpProblem::new(vec![n], vec![-a], vec![(trace, -scale)]).unwrap()
    }

    #[test]
    fn diagonal_eigenvalue_program() {
        let a = ComplexMatrix::from_real_diag(&[1.0, 3.0]);
        let sol = solve(&eigenvalue_program(&a, 1.0), SdpOptions::default());
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((-sol.dual_obj - 3.0).abs() < 1e-7, "{}", sol.dual_obj);
        assert!((sol.y[0] - 3.0).abs() < 1e-7);
    }

    #[test]
    fn random_hermitian_eigenvalue_program() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in [3, 5, 8] {
            let a = ComplexMatrix::random_hermitian(n, &mut rng);
            let sol = solve(&eigenvalue_program(&a, 1.0), SdpOptions::default());
            assert_eq!(sol.status, SdpStatus::Optimal);
            assert!((-sol.primal_obj - a.max_eigenvalue()).abs() < 1e-7);
            assert!(sol.gap <= 1e-8 * (1.0 + sol.primal_obj.abs()));
            assert!(sol.primal_residual <= 1e-8);
            for x in &sol.x {
                assert!(x.min_eigenvalue() >= -1e-8);
            }
        }
    }

    #[test]
    fn contradictory_trace_constraints_are_infeasible() {
        let mut t1 = SparseHermitian::new();
        t1.push_identity(0, 2, 1.0);
        let t2 = t1.clone();
        let p = SdpProblem::new(vec![2], vec![ComplexMatrix::identity(2)], vec![(t1, 1.0), (t2, 2.0)]).unwrap();
        let sol = solve(&p, SdpOptions::default());
        assert_eq!(sol.status, SdpStatus::Infeasible);
    }

    #[test]
    fn consistent_dependent_constraints_are_rejected() {
        let mut t1 = SparseHermitian::new();
        t1.push_identity(0, 2, 1.0);
        let mut t2 = SparseHermitian::new();
        t2.push_identity(0, 2, 2.0);
        let p = SdpProblem::new(vec![2], vec![ComplexMatrix::identity(2)], vec![(t1, 1.0), (t2, 2.0)]);
        assert!(matches!(p, Err(crate::Error::DependentConstraints)));
    }

    #[test]
    fn non_hermitian_data_is_rejected() {
        let c = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(SdpProblem::new(vec![2], vec![c], vec![]).is_err());
    }

    #[test]
    fn infeasible_psd_system_is_detected() {
        // X ⪰ 0 with X_00 = −1 has no solution
        let mut a = SparseHermitian::new();
        a.push(0, 0, 0, C64::new(1.0, 0.0));
        let p = SdpProblem::new(vec![2], vec![ComplexMatrix::identity(2)], vec![(a, -1.0)]).unwrap();
        let sol = solve(&p, SdpOptions::default());
        assert_eq!(sol.status, SdpStatus::Infeasible);
    }

    #[test]
    fn rescaling_constraints_preserves_the_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let a = ComplexMatrix::random_hermitian(4, &mut rng);
        let base = solve(&eigenvalue_program(&a, 1.0), SdpOptions::default());
        let scaled = solve(&eigenvalue_program(&a, 37.5), SdpOptions::default());
        assert_eq!(base.status, scaled.status);
        assert!((base.primal_obj - scaled.primal_obj).abs() < 1e-7);
    }

    #[test]
    fn solves_are_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let a = ComplexMatrix::random_hermitian(5, &mut rng);
        let p = eigenvalue_program(&a, 1.0);
        let s1 = solve(&p, SdpOptions::default());
        let s2 = solve(&p, SdpOptions::default());
        assert_eq!(s1.iterations, s2.iterations);
        assert_eq!(s1.y, s2.y);
        assert_eq!(s1.x, s2.x);
    }

    #[test]
    fn weak_duality_on_feasible_iterates() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let a = ComplexMatrix::random_hermitian(6, &mut rng);
        let tol = 1e-8;
        let sol = solve(&eigenvalue_program(&a, 1.0), SdpOptions { tol, max_iter: 200 });
        for it in sol
            .history
            .iter()
            .filter(|h| h.primal_residual <= tol && h.dual_residual <= tol)
        {
            assert!(it.primal_obj >= it.dual_obj - tol, "{it:?}");
        }
        let last = sol.history.last().unwrap();
        assert!(last.primal_obj >= last.dual_obj - tol);
    }

    #[test]
    fn json_dump_round_trip() {
        let a = ComplexMatrix::from_real_diag(&[1.0, 3.0]);
        let p = eigenvalue_program(&a, 1.0);
        let dump = serde_json::to_string(&SdpProblemDump::from(&p)).unwrap();
        let back: SdpProblem = serde_json::from_str::<SdpProblemDump>(&dump)
            .unwrap()
            .try_into()
            .unwrap();
        let sol = solve(&back, SdpOptions::default());
        assert!((sol.y[0] - 3.0).abs() < 1e-7);
        assert!(serde_json::to_string(&sol).unwrap().contains("\"status\":\"Optimal\""));
    }
}
