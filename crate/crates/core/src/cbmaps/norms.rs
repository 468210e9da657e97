use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::map::LinearMatrixMap;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64, ONE};
use crate::sdp::{self, SdpOptions, SdpProblem, SdpStatus, SparseHermitian};

/// Number of seeded restarts used when a caller has no preference.
pub const DEFAULT_RESTARTS: usize = 32;

const ASCENT_MAX_STEPS: usize = 500;
const ASCENT_REL_TOL: f64 = 1e-13;

/// The best contraction found by the ascent together with `‖m(X)‖`.
#[derive(Clone, Debug)]
pub struct AscentResult {
    pub value: f64,
    pub input: ComplexMatrix,
}

/// Rng for restart `k` under a fixed seed. Each restart draws from its own
/// stream so adding restarts never changes earlier candidates.
fn restart_rng(seed: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let v = ComplexMatrix::random(n, 1, rng).into_vec();
    let nrm = crate::matrix::vec_norm(&v);
    v.into_iter().map(|z| z / nrm).collect()
}

/// Top singular triple `(σ, left, right)` of `y`.
fn top_singular(y: &ComplexMatrix) -> (f64, Vec<C64>, Vec<C64>) {
    let svd = y.svd();
    (svd.singular_values[0], svd.u.col(0), svd.v.col(0))
}

/// Unitary maximising `Re tr(X W)` over contractions: `X = V U*` for
/// `W = U S V*`.
fn polar_maximiser(w: &ComplexMatrix) -> ComplexMatrix {
    let svd = w.svd();
    let x = &svd.v * &svd.u.adjoint();
    // rounding can push ‖X‖ a hair above 1; keep the bound certified
    let nrm = x.norm();
    if nrm > 1.0 {
        x.scale_real(1.0 / nrm)
    } else {
        x
    }
}

/// Alternating ascent from the rank-one frame `η ξ*`: given unit vectors,
/// pick the contraction maximising `|⟨η, m(X) ξ⟩|`; given `X`, take the top
/// singular pair of `m(X)`. Never decreases `‖m(X)‖`.
fn ascend(m: &LinearMatrixMap, mut left: Vec<C64>, mut right: Vec<C64>, start: Option<ComplexMatrix>) -> AscentResult {
    let mut best = AscentResult {
        value: 0.0,
        input: ComplexMatrix::zeros(m.in_dim(), m.in_dim()),
    };
    if let Some(x) = start {
        let y = m.apply_unchecked(&x);
        let (s, l, r) = top_singular(&y);
        best = AscentResult { value: s, input: x };
        left = l;
        right = r;
    }
    for _ in 0..ASCENT_MAX_STEPS {
        // W = Σ B ξ η* A so that ⟨η, m(X) ξ⟩ = tr(X W)
        let frame = crate::matrix::outer(&right, &left);
        let mut w = ComplexMatrix::zeros(m.in_dim(), m.in_dim());
        for (a, b) in m.pairs() {
            w += &(&(b * &frame) * a);
        }
        if w.max_abs() == 0.0 {
            break;
        }
        let x = polar_maximiser(&w);
        let y = m.apply_unchecked(&x);
        let (s, l, r) = top_singular(&y);
        let improved = s > best.value * (1.0 + ASCENT_REL_TOL);
        if s > best.value {
            best = AscentResult { value: s, input: x };
        }
        left = l;
        right = r;
        if !improved {
            break;
        }
    }
    best
}

/// Certified lower bound on `sup{‖m(X)‖ : ‖X‖ ≤ 1}` by alternating ascent
/// over rank-one frames with `restarts` seeded starts. Every reported value
/// is `‖m(X)‖` for an explicit contraction `X`.
pub fn norm_lower(m: &LinearMatrixMap, restarts: usize, seed: u64) -> f64 {
    norm_lower_detailed(m, restarts, seed, &[]).value
}

/// [`norm_lower`] with additional warm-start contractions and the best input.
pub fn norm_lower_detailed(
    m: &LinearMatrixMap,
    restarts: usize,
    seed: u64,
    warm_starts: &[ComplexMatrix],
) -> AscentResult {
    let (din, dout) = (m.in_dim(), m.out_dim());
    if m.is_zero() || din == 0 {
        return AscentResult {
            value: 0.0,
            input: ComplexMatrix::zeros(din, din),
        };
    }
    let mut runs: Vec<AscentResult> = warm_starts
        .par_iter()
        .map(|x| ascend(m, Vec::new(), Vec::new(), Some(x.clone())))
        .collect();
    runs.extend(
        (0..restarts.max(1))
            .into_par_iter()
            .map(|k| {
                let mut rng = restart_rng(seed, k);
                let left = random_unit(dout, &mut rng);
                let right = random_unit(dout, &mut rng);
                ascend(m, left, right, None)
            })
            .collect::<Vec<_>>(),
    );
    // deterministic reduction: first maximum in index order
    runs.into_iter()
        .reduce(|best, r| if r.value > best.value { r } else { best })
        .expect("at least one run")
}

/// Lower bounds for `‖id_{M_k} ⊗ m‖`, `k = 1..=levels`. Level `k + 1` is
/// warm-started from the best level-`k` input padded with zeros, so the
/// sequence is nondecreasing.
pub fn amplification_profile(m: &LinearMatrixMap, levels: usize, restarts: usize, seed: u64) -> Result<Vec<f64>> {
    let d = m.in_dim();
    let mut out = Vec::with_capacity(levels);
    let mut prev: Option<ComplexMatrix> = None;
    for k in 1..=levels {
        let amp = m.amplify(k)?;
        let warm: Vec<ComplexMatrix> = prev
            .iter()
            .map(|x| {
                let mut big = ComplexMatrix::zeros(k * d, k * d);
                big.set_submatrix(0, 0, x);
                big
            })
            .collect();
        let r = norm_lower_detailed(&amp, restarts, seed, &warm);
        out.push(r.value);
        prev = Some(r.input);
    }
    Ok(out)
}

/// Solver statistics behind a cb-norm value.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CbNormReport {
    pub value: f64,
    pub status: SdpStatus,
    pub gap: f64,
    pub iterations: usize,
    pub tol: f64,
}

/// `‖m‖_cb` within `tol`: the diamond norm of the adjoint map, from the SDP
///
/// ```text
/// min ½(‖Tr₂ Y₀‖ + ‖Tr₂ Y₁‖)  s.t.  [[Y₀, −J], [−J*, Y₁]] ⪰ 0
/// ```
///
/// where `J` is the Choi matrix of the adjoint and `Tr₂` traces out its
/// second (output) factor.
pub fn cb_norm(m: &LinearMatrixMap, tol: f64) -> Result<f64> {
    cb_norm_detailed(m, tol).map(|r| r.value)
}

pub fn cb_norm_detailed(m: &LinearMatrixMap, tol: f64) -> Result<CbNormReport> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} outside (0, 1)")));
    }
    if m.is_zero() {
        return Ok(CbNormReport {
            value: 0.0,
            status: SdpStatus::Optimal,
            gap: 0.0,
            iterations: 0,
            tol,
        });
    }
    let adj = m.adjoint();
    // Scale J to unit max entry for conditioning; the norm is homogeneous.
    let scale = adj.choi().max_abs();
    let j = adj.choi().scale_real(1.0 / scale);
    let problem = diamond_sdp(&j, adj.in_dim(), adj.out_dim())?;
    let sol = sdp::solve(&problem, SdpOptions { tol, max_iter: 200 });
    match sol.status {
        SdpStatus::Optimal => {}
        other => {
            return Err(Error::SolverFailure(format!(
                "cb-norm SDP ended with {other:?} after {} iterations (gap {:.2e})",
                sol.iterations, sol.gap
            )))
        }
    }
    let value = -0.5 * (sol.primal_obj + sol.dual_obj) * scale;
    Ok(CbNormReport {
        value: value.max(0.0),
        status: sol.status,
        gap: sol.gap * scale,
        iterations: sol.iterations,
        tol,
    })
}

/// Standard-form encoding of the diamond-norm SDP for a map with Choi
/// matrix `j` on `C^{d_in} ⊗ C^{d_out}`. Dual variables: Hermitian
/// coordinates of `Y₀`, `Y₁`, then `t₀`, `t₁`; dual objective `−½(t₀ + t₁)`.
fn diamond_sdp(j: &ComplexMatrix, d_in: usize, d_out: usize) -> Result<SdpProblem> {
    let n = d_in * d_out;
    let dims = vec![2 * n, d_in, d_in];
    let mut c0 = ComplexMatrix::zeros(2 * n, 2 * n);
    c0.set_submatrix(0, n, &-j);
    c0.set_submatrix(n, 0, &-&j.adjoint());
    let objective = vec![c0, ComplexMatrix::zeros(d_in, d_in), ComplexMatrix::zeros(d_in, d_in)];

    let mut constraints = Vec::with_capacity(2 * n * n + 2);
    for (copy, offset) in [(1usize, 0usize), (2, n)] {
        for p in 0..n {
            for q in p..n {
                let (xp, yp) = (p / d_out, p % d_out);
                let (xq, yq) = (q / d_out, q % d_out);
                let coords: &[C64] = if p == q { &[ONE] } else { &[ONE, crate::matrix::I] };
                for &h in coords {
                    let mut a = SparseHermitian::new();
                    a.push(0, offset + p, offset + q, -h);
                    if yp == yq {
                        a.push(copy, xp, xq, h);
                    }
                    constraints.push((a, 0.0));
                }
            }
        }
    }
    for copy in [1usize, 2] {
        let mut a = SparseHermitian::new();
        a.push_identity(copy, d_in, -1.0);
        constraints.push((a, -0.5));
    }
    SdpProblem::new(dims, objective, constraints)
}

/// `norm_lower(amplify(m, outDim))`: a lower bound for `‖m‖_cb` that is
/// exact in value when the ascent finds the global maximum.
pub fn cb_norm_via_amplification(m: &LinearMatrixMap, restarts: usize, seed: u64) -> Result<f64> {
    let profile = amplification_profile(m, m.out_dim().max(1), restarts, seed)?;
    Ok(*profile.last().expect("at least one level"))
}

/// Comparison of `‖m‖_cb` with `outDim · ‖m‖`.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DimBoundReport {
    pub norm_lb: f64,
    pub cb: f64,
    pub ratio: f64,
    pub bound: usize,
    /// Slack allowed for the incompleteness of the ascent oracle.
    pub slack: f64,
    /// Smallest slack for which `cb ≤ bound · norm_lb · (1 + slack)` holds.
    pub required_slack: f64,
    pub holds: bool,
    pub tol: f64,
}

pub fn dim_bound_check(
    m: &LinearMatrixMap,
    tol: f64,
    restarts: usize,
    seed: u64,
    slack: f64,
) -> Result<DimBoundReport> {
    let norm_lb = norm_lower(m, restarts, seed);
    let cb = cb_norm(m, tol)?;
    let bound = m.out_dim();
    let ratio = if norm_lb > 0.0 {
        cb / norm_lb
    } else if cb > tol {
        f64::INFINITY
    } else {
        1.0
    };
    let required_slack = (ratio / bound as f64 - 1.0).max(0.0);
    Ok(DimBoundReport {
        norm_lb,
        cb,
        ratio,
        bound,
        slack,
        required_slack,
        holds: required_slack <= slack,
        tol,
    })
}
