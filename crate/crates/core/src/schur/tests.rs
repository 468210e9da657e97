use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::cbmaps::{cb_norm, LinearMatrixMap};
use crate::matrix::{BlockMatrix, ComplexMatrix, C64};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn real(n: usize, v: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_real(n, n, v).unwrap()
}

fn scalar(n: usize, v: &[f64]) -> SchurSymbol {
    SchurSymbol::from_scalar(&real(n, v), 1).unwrap()
}

/// Direct double sum: block (m, n) = Σ_i aⁱ_m T_mn bⁱ_n.
fn double_sum(rep: &DiagonalRepresentation, t: &BlockMatrix) -> BlockMatrix {
    BlockMatrix::from_fn(t.grid_size(), t.block_dim(), |m, n| {
        let mut acc = ComplexMatrix::zeros(t.block_dim(), t.block_dim());
        for i in 0..rep.len() {
            acc += &(&(rep.a(i, m) * t.block(m, n)) * rep.b(i, n));
        }
        acc
    })
}

#[test]
fn identity_symbol_leaves_blocks_unchanged() {
    let t = BlockMatrix::random(3, 2, &mut rng(1));
    assert_eq!(apply_symbol(&SchurSymbol::identity(3, 2), &t).unwrap(), t);
}

#[test]
fn scalar_application_uses_transposed_index() {
    // block (m, n) is multiplied by φ[n, m]
    let phi = scalar(2, &[1.0, 2.0, 3.0, 4.0]);
    let ones = BlockMatrix::reblock(&real(2, &[1.0, 1.0, 1.0, 1.0]), 2, 1).unwrap();
    let out = apply_symbol(&phi, &ones).unwrap().flatten();
    assert_eq!(out, real(2, &[1.0, 3.0, 2.0, 4.0]));
}

#[test]
fn diagonal_mask_compresses_to_the_diagonal() {
    let d = 2;
    let phi = SchurSymbol::from_fn(3, d, |m, n| {
        if m == n {
            LinearMatrixMap::identity(d)
        } else {
            LinearMatrixMap::zero(d, d)
        }
    })
    .unwrap();
    let t = BlockMatrix::random(3, d, &mut rng(2));
    let want = BlockMatrix::diagonal(&diagonal_expectation(&t)).unwrap();
    assert_eq!(apply_symbol(&phi, &t).unwrap(), want);
}

#[test]
fn apply_rejects_shape_mismatch() {
    assert!(apply_symbol(&SchurSymbol::identity(2, 2), &BlockMatrix::zeros(3, 2)).is_err());
    assert!(apply_symbol(&SchurSymbol::identity(2, 2), &BlockMatrix::zeros(2, 3)).is_err());
}

#[test]
fn multiplier_norm_examples() {
    let ones = scalar(4, &[1.0; 16]);
    let r = multiplier_norm(&ones, 1e-9).unwrap();
    assert_eq!(r.method, NormMethod::ScalarSdp);
    assert!((r.cb - 1.0).abs() < 1e-6 && r.norm_lb >= 1.0 - 1e-6, "{r:?}");

    let u = [1.0, -2.0, 0.5];
    let v = [0.3, 1.5, -1.0];
    let phi = SchurSymbol::from_scalar(&ComplexMatrix::from_fn(3, 3, |i, j| C64::new(u[i] * v[j], 0.0)), 1).unwrap();
    let r = multiplier_norm(&phi, 1e-9).unwrap();
    assert!((r.cb - 2.0 * 1.5).abs() < 1e-6, "{r:?}");

    let h = scalar(2, &[1.0, 1.0, 1.0, -1.0]);
    let r = multiplier_norm(&h, 1e-9).unwrap();
    assert!((r.cb - 2f64.sqrt()).abs() < 1e-6, "{r:?}");
    assert!((r.norm_lb - 2f64.sqrt()).abs() < 1e-6, "{r:?}");
}

#[test]
fn hadamard_lower_bound_by_direct_evaluation() {
    // φ∘(H/√2) has norm √2
    let h = real(2, &[1.0, 1.0, 1.0, -1.0]).scale_real(0.5f64.sqrt());
    let t = BlockMatrix::reblock(&h, 2, 1).unwrap();
    let out = apply_symbol(&scalar(2, &[1.0, 1.0, 1.0, -1.0]), &t).unwrap();
    assert!((out.flatten().norm() - 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn scalar_and_assembled_programs_agree() {
    let mut g = rng(3);
    for n in 2..=4 {
        let phi = ComplexMatrix::random(n, n, &mut g);
        let sym = SchurSymbol::from_scalar(&phi, 1).unwrap();
        let fast = multiplier_norm(&sym, 1e-9).unwrap().cb;
        let generic = cb_norm(&sym.assembled_map(), 1e-9).unwrap();
        assert!((fast - generic).abs() < 1e-6, "N={n}: {fast} vs {generic}");
    }
}

#[test]
fn ascent_meets_cb_on_scalar_symbols() {
    let mut g = rng(4);
    for n in [2, 3, 5, 8] {
        let sym = SchurSymbol::from_scalar(&ComplexMatrix::random(n, n, &mut g), 1).unwrap();
        let r = multiplier_norm(&sym, 1e-9).unwrap();
        assert!(r.norm_lb >= r.cb - 1e-3, "N={n}: {r:?}");
    }
}

#[test]
fn non_scalar_symbol_uses_assembled_program() {
    let sym = SchurSymbol::random(2, 2, 2, &mut rng(5));
    assert!(!sym.is_scalar());
    let r = multiplier_norm(&sym, 1e-8).unwrap();
    assert_eq!(r.method, NormMethod::AssembledSdp);
    assert!(r.norm_lb <= r.cb + 1e-8);
}

#[test]
fn degenerate_symbols_have_zero_norm() {
    for sym in [
        SchurSymbol::zero(3, 2),
        SchurSymbol::identity(0, 2),
        SchurSymbol::identity(2, 0),
    ] {
        let r = multiplier_norm(&sym, 1e-8).unwrap();
        assert_eq!((r.cb, r.norm_lb), (0.0, 0.0));
    }
}

#[test]
fn scalar_factorization_examples() {
    let f = scalar_factorization(&scalar(3, &[1.0; 9]), 1e-10).unwrap();
    assert!((f.value - 1.0).abs() < 1e-5 && f.residual < 1e-8, "{f:?}");

    let u = [2.0, -0.5];
    let v = [1.0, 3.0];
    let phi = SchurSymbol::from_scalar(&ComplexMatrix::from_fn(2, 2, |i, j| C64::new(u[i] * v[j], 0.0)), 1).unwrap();
    let f = scalar_factorization(&phi, 1e-10).unwrap();
    assert!((f.value - 6.0).abs() < 1e-5 && f.residual < 1e-8, "{f:?}");

    let sym = SchurSymbol::from_scalar(&ComplexMatrix::random(4, 4, &mut rng(6)), 1).unwrap();
    let f = scalar_factorization(&sym, 1e-10).unwrap();
    assert!(f.residual < 1e-8, "{}", f.residual);
    assert!((f.value - f.cb).abs() < 1e-5, "{} vs {}", f.value, f.cb);

    let err = scalar_factorization(&SchurSymbol::random(2, 2, 1, &mut rng(7)), 1e-8).unwrap_err();
    assert!(err.to_string().starts_with("scalar only"));
}

#[test]
fn diagonal_expectation_examples() {
    let mut g = rng(8);
    let diag: Vec<_> = (0..3).map(|_| ComplexMatrix::random(2, 2, &mut g)).collect();
    let s = BlockMatrix::diagonal(&diag).unwrap();
    assert_eq!(diagonal_expectation(&s), diag);
    let e2 = diagonal_expectation_n(&s, 2);
    assert_eq!(&e2[..2], &diag[..2]);
    assert_eq!(e2[2], ComplexMatrix::zeros(2, 2));

    let mut off = BlockMatrix::random(3, 2, &mut g);
    for k in 0..3 {
        *off.block_mut(k, k) = ComplexMatrix::zeros(2, 2);
    }
    assert!(diagonal_expectation(&off).iter().all(|b| b.max_abs() == 0.0));

    for _ in 0..10 {
        let s = BlockMatrix::random(4, 2, &mut g);
        let top = diagonal_expectation(&s).iter().map(|b| b.norm()).fold(0.0, f64::max);
        assert!(top <= s.flatten().norm() + 1e-12);
    }
}

#[test]
fn two_sided_map_examples() {
    let mut g = rng(9);
    let id = two_sided_map(vec![BlockMatrix::identity(3, 2)], vec![BlockMatrix::identity(3, 2)]).unwrap();
    let t = BlockMatrix::random(3, 2, &mut g);
    assert!(id.apply_block(&t).unwrap().max_diff(&t) < 1e-15);

    let r: Vec<_> = (0..3).map(|_| ComplexMatrix::random(2, 2, &mut g)).collect();
    let s: Vec<_> = (0..3).map(|_| ComplexMatrix::random(2, 2, &mut g)).collect();
    let psi = two_sided_map(
        vec![BlockMatrix::diagonal(&r).unwrap()],
        vec![BlockMatrix::diagonal(&s).unwrap()],
    )
    .unwrap();
    for m in 0..3 {
        for n in 0..3 {
            let a = ComplexMatrix::random(2, 2, &mut g);
            let out = psi.apply_block(&BlockMatrix::unit(3, m, n, &a)).unwrap();
            let want = BlockMatrix::unit(3, m, n, &(&(&r[m] * &a) * &s[n]));
            assert!(out.max_diff(&want) < 1e-12);
        }
    }

    let psi = two_sided_map(
        (0..2).map(|_| BlockMatrix::random(3, 2, &mut g)).collect(),
        (0..2).map(|_| BlockMatrix::random(3, 2, &mut g)).collect(),
    )
    .unwrap();
    let (t1, t2) = (BlockMatrix::random(3, 2, &mut g), BlockMatrix::random(3, 2, &mut g));
    let c = C64::new(0.7, -1.3);
    let sum = BlockMatrix::reblock(&(&t1.flatten() + &t2.flatten().scale(c)), 3, 2).unwrap();
    let lhs = psi.apply_block(&sum).unwrap().flatten();
    let rhs = &psi.apply_block(&t1).unwrap().flatten() + &psi.apply_block(&t2).unwrap().flatten().scale(c);
    assert!(lhs.max_diff(&rhs) < 1e-12);
}

#[test]
fn compression_examples() {
    let mut g = rng(10);
    let id = two_sided_map(vec![BlockMatrix::identity(3, 2)], vec![BlockMatrix::identity(3, 2)]).unwrap();
    assert!(schur_compression(&id).unwrap().max_diff(&SchurSymbol::identity(3, 2)) < 1e-12);

    // entry (m, n) acts as a ↦ Σ R_nn a S_mm
    let r: Vec<_> = (0..2).map(|_| BlockMatrix::random(3, 2, &mut g)).collect();
    let s: Vec<_> = (0..2).map(|_| BlockMatrix::random(3, 2, &mut g)).collect();
    let sym = schur_compression(&two_sided_map(r.clone(), s.clone()).unwrap()).unwrap();
    for m in 0..3 {
        for n in 0..3 {
            let a = ComplexMatrix::random(2, 2, &mut g);
            let mut want = ComplexMatrix::zeros(2, 2);
            for i in 0..2 {
                want += &(&(r[i].block(n, n) * &a) * s[i].block(m, m));
            }
            assert!(sym.entry(m, n).apply(&a).unwrap().max_diff(&want) < 1e-12);
        }
    }

    let phi = SchurSymbol::random(3, 2, 2, &mut g);
    assert!(schur_compression(&phi).unwrap().max_diff(&phi) < 1e-12);
}

#[test]
fn compression_identity_examples() {
    let mut g = rng(11);
    let diag = |g: &mut ChaCha8Rng| {
        BlockMatrix::diagonal(&(0..3).map(|_| ComplexMatrix::random(2, 2, g)).collect::<Vec<_>>()).unwrap()
    };
    let r = vec![diag(&mut g), diag(&mut g)];
    let s = vec![diag(&mut g), diag(&mut g)];
    let rep = diagonal_compression_identity_check(&r, &s, 5, 0).unwrap();
    assert!(rep.symbol_residual < 1e-12 && rep.action_residual < 1e-12, "{rep:?}");

    let r: Vec<_> = (0..3).map(|_| BlockMatrix::random(4, 2, &mut g)).collect();
    let s: Vec<_> = (0..3).map(|_| BlockMatrix::random(4, 2, &mut g)).collect();
    let rep = diagonal_compression_identity_check(&r, &s, 5, 1).unwrap();
    assert!(rep.symbol_residual < 1e-12 && rep.action_residual < 1e-12, "{rep:?}");

    let zero = vec![BlockMatrix::zeros(4, 2); 3];
    let rep = diagonal_compression_identity_check(&r, &zero, 5, 2).unwrap();
    assert_eq!((rep.symbol_residual, rep.action_residual), (0.0, 0.0));
}

#[test]
fn representation_examples() {
    let d = 2;
    let ids = vec![vec![ComplexMatrix::identity(d); 3]];
    let rep = DiagonalRepresentation::new(3, d, ids.clone(), ids).unwrap();
    assert!(representation_to_symbol(&rep).max_diff(&SchurSymbol::identity(3, d)) < 1e-15);

    let alpha = [1.0, 2.0, -0.5];
    let beta = [0.5, 3.0, 1.5];
    let fam = |c: &[f64]| {
        vec![c
            .iter()
            .map(|&x| ComplexMatrix::identity(d).scale_real(x))
            .collect::<Vec<_>>()]
    };
    let rep = DiagonalRepresentation::new(3, d, fam(&alpha), fam(&beta)).unwrap();
    let sym = representation_to_symbol(&rep);
    let want = ComplexMatrix::from_fn(3, 3, |m, n| C64::new(alpha[n] * beta[m], 0.0));
    assert!(sym.scalar_values().unwrap().max_diff(&want) < 1e-14);

    let mut g = rng(12);
    let rep = DiagonalRepresentation::random(3, 4, 2, &mut g);
    let t = BlockMatrix::random(4, 2, &mut g);
    let via_symbol = apply_symbol(&representation_to_symbol(&rep), &t).unwrap();
    assert!(via_symbol.max_diff(&double_sum(&rep, &t)) < 1e-12);
}

#[test]
fn empty_representation_gives_zero_symbol() {
    let rep = DiagonalRepresentation::new(3, 2, vec![], vec![]).unwrap();
    let sym = representation_to_symbol(&rep);
    assert!(sym.max_diff(&SchurSymbol::zero(3, 2)) == 0.0);
    assert_eq!(multiplier_norm(&sym, 1e-8).unwrap().cb, 0.0);
}

#[test]
fn decay_report_examples() {
    let d = 2;
    let fam = vec![(1..=4)
        .map(|k| ComplexMatrix::identity(d).scale_real(1.0 / k as f64))
        .collect::<Vec<_>>()];
    let rep = DiagonalRepresentation::new(4, d, fam.clone(), fam).unwrap();
    let r = representation_decay_report(&rep);
    for k in 1..=4 {
        assert!((r.row_decay[k - 1] - 1.0 / (k * k) as f64).abs() < 1e-14);
        assert!((r.col_decay[k - 1] - 1.0 / (k * k) as f64).abs() < 1e-14);
    }

    let c = vec![vec![ComplexMatrix::identity(d); 4]];
    let flat = representation_decay_report(&DiagonalRepresentation::new(4, d, c.clone(), c).unwrap());
    assert!(flat.row_decay.iter().all(|&x| (x - 1.0).abs() < 1e-14));

    let mut g = rng(13);
    let rep = DiagonalRepresentation::random(3, 3, 2, &mut g);
    let r = representation_decay_report(&rep);
    for k in 0..3 {
        let mut ga = ComplexMatrix::zeros(2, 2);
        let mut gb = ComplexMatrix::zeros(2, 2);
        for i in 0..3 {
            ga += &(rep.a(i, k) * &rep.a(i, k).adjoint());
            gb += &(&rep.b(i, k).adjoint() * rep.b(i, k));
        }
        // oracle: largest eigenvalue by eigendecomposition
        let top = |m: ComplexMatrix| *m.hermitian_eigen().values.last().unwrap();
        assert!((r.row_decay[k] - top(ga)).abs() < 1e-10);
        assert!((r.col_decay[k] - top(gb)).abs() < 1e-10);
    }
}

#[test]
fn cb_is_below_representation_bound() {
    let mut g = rng(14);
    for _ in 0..3 {
        let rep = DiagonalRepresentation::random(2, 2, 2, &mut g);
        let cb = multiplier_norm(&representation_to_symbol(&rep), 1e-9).unwrap().cb;
        assert!(cb <= representation_bound(&rep) + 1e-8);
    }
}

#[test]
fn tail_examples() {
    let n = 5;
    let ones = scalar(n, &vec![1.0; n * n]);
    assert_eq!(tail_multiplier_norm(&ones, n, 1e-9).unwrap(), 0.0);
    for k in 0..n {
        let t = tail_multiplier_norm(&ones, k, 1e-9).unwrap();
        assert!((t - 1.0).abs() < 1e-6, "n={k}: {t}");
    }
    let diag = SchurSymbol::from_scalar(
        &ComplexMatrix::from_real_diag(&(1..=n).map(|k| 1.0 / k as f64).collect::<Vec<_>>()),
        1,
    )
    .unwrap();
    for k in 0..n {
        let t = tail_multiplier_norm(&diag, k, 1e-9).unwrap();
        assert!((t - 1.0 / (k + 1) as f64).abs() < 1e-6, "n={k}: {t}");
    }
    assert!(tail_multiplier_norm(&diag, n + 1, 1e-9).is_err());
}

#[test]
fn corner_zeroing_can_raise_the_norm() {
    // Zeroing only the (0,0) entry of the all-ones 2x2 symbol leaves
    // [[0,1],[1,1]], whose multiplier norm exceeds 1.
    let ones = scalar(2, &[1.0; 4]);
    let t = corner_tail_multiplier_norm(&ones, 1, 1e-9).unwrap();
    let h = real(2, &[1.0, 1.0, 1.0, -1.0]).scale_real(0.5f64.sqrt());
    let lower = apply_symbol(
        &scalar(2, &[0.0, 1.0, 1.0, 1.0]),
        &BlockMatrix::reblock(&h, 2, 1).unwrap(),
    )
    .unwrap()
    .flatten()
    .norm();
    assert!(lower > 1.1);
    assert!(t >= lower - 1e-8, "{t} vs {lower}");
}

#[test]
fn counterexample_examples() {
    let rows = counterexample_report(4, |k| 1.0 / k as f64, 1e-9, 16, 0).unwrap();
    assert_eq!(rows.len(), 4);
    assert!((rows[0].block_norm - 1.0).abs() < 1e-9 && (rows[0].block_cb - 1.0).abs() < 1e-6);
    for r in &rows {
        assert!((r.block_cb - 1.0).abs() < 1e-4, "{r:?}");
        assert!((r.block_norm - 1.0 / r.k as f64).abs() < 1e-6, "{r:?}");
    }
    let rows = counterexample_report(3, |k| 1.0 / (k * k) as f64, 1e-9, 16, 0).unwrap();
    for r in &rows {
        assert!((r.block_cb - 1.0 / r.k as f64).abs() < 1e-4, "{r:?}");
    }
    assert!(counterexample_report(0, |_| 1.0, 1e-8, 4, 0).is_err());
    assert!(counterexample_report(2, |_| -1.0, 1e-8, 4, 0).is_err());
}

#[test]
fn kernel_bound_examples() {
    let mut g = rng(15);
    let a = ComplexMatrix::random(2, 2, &mut g);
    let k = BlockMatrix::unit(3, 1, 2, &ComplexMatrix::unit(2, 2, 0, 1).scale_real(2.5));
    let r = kernel_bound_check(&k, &SchurSymbol::identity(3, 2), 1e-8).unwrap();
    assert!(r.operator_margin.abs() < 1e-12);
    assert!(r.image_margin.abs() < 1e-12);

    let r = kernel_bound_check(&BlockMatrix::unit(3, 0, 0, &a), &SchurSymbol::identity(3, 2), 1e-8).unwrap();
    assert!(r.operator_margin >= -1e-10 && r.image_margin.abs() < 1e-12);

    for _ in 0..5 {
        let k = BlockMatrix::random(3, 2, &mut g);
        let phi = SchurSymbol::random(3, 2, 2, &mut g);
        let r = kernel_bound_check(&k, &phi, 1e-8).unwrap();
        assert!(r.operator_margin >= -1e-10 && r.image_hs_margin >= -1e-10, "{r:?}");
    }
}

#[test]
fn symbol_json_forms() {
    let s: SchurSymbol = serde_json::from_str(r#"{"scalar":[[1,2],[3,[0,1]]]}"#).unwrap();
    assert!(s.is_scalar());
    assert_eq!(s.scalar_values().unwrap()[(1, 1)], C64::new(0.0, 1.0));
    let text = serde_json::to_string(&s).unwrap();
    assert_eq!(text, r#"{"scalar":[[1.0,2.0],[3.0,[0.0,1.0]]]}"#);

    let sym = SchurSymbol::random(2, 2, 1, &mut rng(16));
    let text = serde_json::to_string(&sym).unwrap();
    assert!(text.starts_with(r#"{"gridSize":2,"blockDim":2,"entries":[["#));
    let back: SchurSymbol = serde_json::from_str(&text).unwrap();
    assert!(back.max_diff(&sym) < 1e-15);
    assert!(serde_json::from_str::<SchurSymbol>(r#"{"scalar":[[1,2],[3]]}"#).is_err());

    let rep = DiagonalRepresentation::random(2, 3, 2, &mut rng(17));
    let text = serde_json::to_string(&rep).unwrap();
    assert!(text.starts_with(r#"{"a":[["#));
    assert_eq!(serde_json::from_str::<DiagonalRepresentation>(&text).unwrap(), rep);
}
