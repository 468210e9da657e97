use opspace::cbmaps::{cb_norm, norm_lower, LinearMatrixMap};
use opspace::haagerup::{col_norm, elementary_operator, haagerup_norm_sdp, row_norm, HaagerupTensor};
use opspace::matrix::{BlockMatrix, ComplexMatrix, C64};
use opspace::schur::{apply_symbol, representation_to_symbol, schur_compression, DiagonalRepresentation, SchurSymbol};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn scalar() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| C64::new(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn map_json_round_trip_is_exact(seed: u64, d_in in 1usize..4, d_out in 1usize..4, r in 1usize..4) {
        let m = LinearMatrixMap::random(d_in, d_out, r, &mut rng(seed));
        let back: LinearMatrixMap = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        prop_assert_eq!(back.choi(), m.choi());
    }

    #[test]
    fn choi_round_trip_preserves_action(seed: u64, d_in in 1usize..4, d_out in 1usize..4, r in 1usize..4) {
        let m = LinearMatrixMap::random(d_in, d_out, r, &mut rng(seed));
        let back = LinearMatrixMap::from_choi(m.choi(), d_in, d_out).unwrap();
        prop_assert!(back.action_distance(&m) < 1e-12 * (1.0 + m.choi().max_abs()));
    }

    #[test]
    fn maps_are_linear(seed: u64, d in 1usize..4, a in scalar(), b in scalar()) {
        let mut g = rng(seed);
        let m = LinearMatrixMap::random(d, d, 2, &mut g);
        let x = ComplexMatrix::random(d, d, &mut g);
        let y = ComplexMatrix::random(d, d, &mut g);
        let lhs = m.apply(&(&x.scale(a) + &y.scale(b))).unwrap();
        let rhs = &m.apply(&x).unwrap().scale(a) + &m.apply(&y).unwrap().scale(b);
        prop_assert!(lhs.max_diff(&rhs) < 1e-12 * (1.0 + rhs.max_abs()));
    }

    #[test]
    fn symbol_json_round_trip_is_exact(seed: u64, n in 1usize..4, d in 1usize..3) {
        let phi = SchurSymbol::random(n, d, 2, &mut rng(seed));
        let back: SchurSymbol = serde_json::from_str(&serde_json::to_string(&phi).unwrap()).unwrap();
        prop_assert_eq!(back.max_diff(&phi), 0.0);
    }

    #[test]
    fn representation_json_round_trip_is_exact(seed: u64, r in 1usize..3, n in 1usize..4, d in 1usize..3) {
        let mut g = rng(seed);
        let rep = DiagonalRepresentation::random(r, n, d, &mut g);
        let back: DiagonalRepresentation = serde_json::from_str(&serde_json::to_string(&rep).unwrap()).unwrap();
        let t = BlockMatrix::random(n, d, &mut g);
        let lhs = apply_symbol(&representation_to_symbol(&back), &t).unwrap();
        let rhs = apply_symbol(&representation_to_symbol(&rep), &t).unwrap();
        prop_assert_eq!(lhs.max_diff(&rhs), 0.0);
    }

    #[test]
    fn symbol_action_matches_assembled_map(seed: u64, n in 1usize..4, d in 1usize..3) {
        let mut g = rng(seed);
        let phi = SchurSymbol::random(n, d, 2, &mut g);
        let t = BlockMatrix::random(n, d, &mut g);
        let direct = apply_symbol(&phi, &t).unwrap().flatten();
        let assembled = phi.assembled_map().apply(&t.flatten()).unwrap();
        prop_assert!(direct.max_diff(&assembled) < 1e-12 * (1.0 + direct.max_abs()));
    }

    #[test]
    fn compression_recovers_the_symbol(seed: u64, n in 1usize..4, d in 1usize..3) {
        let phi = SchurSymbol::random(n, d, 2, &mut rng(seed));
        prop_assert!(schur_compression(&phi).unwrap().max_diff(&phi) < 1e-12);
    }

    #[test]
    fn representation_change_leaves_the_operator_fixed(seed: u64, d in 1usize..4, r in 1usize..4) {
        let mut g = rng(seed);
        let v = HaagerupTensor::random(d, r, &mut g);
        // Identity plus a small perturbation is safely invertible.
        let f = &ComplexMatrix::identity(r) + &ComplexMatrix::random(r, r, &mut g).scale(C64::new(0.2 / r as f64, 0.0));
        let w = v.transform(&f).unwrap();
        let dist = elementary_operator(&w).action_distance(&elementary_operator(&v));
        prop_assert!(dist < 1e-10, "{}", dist);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn norm_lower_is_absolutely_homogeneous(seed: u64, d in 1usize..4, c in scalar()) {
        prop_assume!(c.norm() > 0.05);
        let m = LinearMatrixMap::random(d, d, 2, &mut rng(seed));
        let base = norm_lower(&m, 8, 3);
        let scaled = norm_lower(&m.scale(c), 8, 3);
        prop_assert!((scaled - c.norm() * base).abs() <= 1e-9 * (1.0 + scaled));
    }

    #[test]
    fn cb_norm_is_absolutely_homogeneous(seed: u64, d in 1usize..4, c in scalar()) {
        prop_assume!(c.norm() > 0.05);
        let m = LinearMatrixMap::random(d, d, 2, &mut rng(seed));
        let base = cb_norm(&m, TOL).unwrap();
        let scaled = cb_norm(&m.scale(c), TOL).unwrap();
        prop_assert!((scaled - c.norm() * base).abs() <= 1e-6 * (1.0 + scaled));
    }

    #[test]
    fn norm_lower_never_exceeds_cb(seed: u64, d_in in 1usize..4, d_out in 1usize..4, r in 1usize..4) {
        let m = LinearMatrixMap::random(d_in, d_out, r, &mut rng(seed));
        let lb = norm_lower(&m, 8, seed);
        let cb = cb_norm(&m, TOL).unwrap();
        prop_assert!(lb <= cb + TOL * (1.0 + cb), "{} > {}", lb, cb);
    }

    #[test]
    fn cb_norm_is_subadditive(seed: u64, d in 1usize..4) {
        let mut g = rng(seed);
        let a = LinearMatrixMap::random(d, d, 2, &mut g);
        let b = LinearMatrixMap::random(d, d, 2, &mut g);
        let sum = cb_norm(&a.sum(&b).unwrap(), TOL).unwrap();
        let parts = cb_norm(&a, TOL).unwrap() + cb_norm(&b, TOL).unwrap();
        prop_assert!(sum <= parts + 1e-6 * (1.0 + parts));
    }

    #[test]
    fn haagerup_norm_is_below_every_representation(seed: u64, d in 1usize..4, r in 1usize..4) {
        let v = HaagerupTensor::random(d, r, &mut rng(seed));
        let h = haagerup_norm_sdp(&v, TOL).unwrap();
        let bound = row_norm(&v) * col_norm(&v);
        prop_assert!(h <= bound + 1e-6 * (1.0 + bound));
    }
}
