//! The acceptance battery: one check per criterion, each with a measured
//! worst-case quantity, the threshold it is held to and a pass flag.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cbmaps::{cb_norm, dim_bound_check, norm_lower, LinearMatrixMap};
use crate::error::Result;
use crate::haagerup::{haagerup_norm_factorized, haagerup_norm_sdp, HaagerupTensor};
use crate::matrix::{BlockMatrix, ComplexMatrix};
use crate::schur::{
    apply_symbol, counterexample_report, diagonal_compression_identity_check, kernel_bound_check, multiplier_norm_with,
    representation_to_symbol, schur_compression, tail_multiplier_norm, DiagonalRepresentation, SchurSymbol,
};

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub tol: f64,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            seed: 0,
            restarts: 32,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    /// One line per sub-check: measured value against its threshold.
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
    pub budget_seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Check {
    pub what: String,
    /// Worst observed deviation (or margin, see `what`).
    pub worst: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `worst ≤ threshold`.
    fn at_most(what: impl Into<String>, worst: f64, threshold: f64) -> Self {
        Self {
            what: what.into(),
            worst,
            threshold,
            passed: worst <= threshold,
        }
    }

    /// Passes when `worst ≥ threshold`.
    fn at_least(what: impl Into<String>, worst: f64, threshold: f64) -> Self {
        Self {
            what: what.into(),
            worst,
            threshold,
            passed: worst >= threshold,
        }
    }
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "criterion {} [{}] {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name
        )?;
        if let Some(s) = self.seconds {
            write!(f, " ({s:.1}s of {:.0}s budget)", self.budget_seconds)?;
        }
        for c in &self.checks {
            let cmp = if c.passed { "ok" } else { "VIOLATED" };
            write!(
                f,
                "\n    {}: worst {:.3e}, threshold {:.1e} {cmp}",
                c.what, c.worst, c.threshold
            )?;
        }
        Ok(())
    }
}

fn finish(id: u32, name: &'static str, budget: f64, start: Instant, checks: Vec<Check>) -> CriterionResult {
    let seconds = start.elapsed().as_secs_f64();
    let mut passed = checks.iter().all(|c| c.passed);
    if seconds > budget {
        passed = false;
    }
    CriterionResult {
        id,
        name,
        passed,
        checks,
        seconds: Some(seconds),
        budget_seconds: budget,
    }
}

fn rng(cfg: &SuiteConfig, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
    r.set_stream(stream);
    r
}

/// Transpose: cb = n, norm = 1, and the weighted counterexample table.
pub fn transpose_dichotomy(cfg: &SuiteConfig) -> Result<CriterionResult> {
    let start = Instant::now();
    let (mut cb_err, mut norm_err) = (0.0f64, 0.0f64);
    for n in 2..=5 {
        let t = LinearMatrixMap::transpose(n);
        cb_err = cb_err.max((cb_norm(&t, cfg.tol)? - n as f64).abs());
        norm_err = norm_err.max((norm_lower(&t, cfg.restarts, cfg.seed) - 1.0).abs());
    }
    let rows = counterexample_report(4, |k| 1.0 / k as f64, cfg.tol, cfg.restarts, cfg.seed)?;
    let row_cb = rows.iter().map(|r| (r.block_cb - 1.0).abs()).fold(0.0, f64::max);
    let row_norm = rows
        .iter()
        .map(|r| (r.block_norm - 1.0 / r.k as f64).abs())
        .fold(0.0, f64::max);
    Ok(finish(
        1,
        "transpose dichotomy",
        120.0,
        start,
        vec![
            Check::at_most("|cb(transpose_n) - n|, n = 2..5", cb_err, 1e-5),
            Check::at_most("|norm_lower(transpose_n) - 1|, n = 2..5", norm_err, 1e-6),
            Check::at_most("|blockCb - 1|, K = 4, alpha_k = 1/k", row_cb, 1e-4),
            Check::at_most("|blockNorm - 1/k|, K = 4, alpha_k = 1/k", row_norm, 1e-6),
        ],
    ))
}

/// Haagerup norm of `Σ E_ij ⊗ E_ij` and agreement of the two routes.
pub fn haagerup_identification(cfg: &SuiteConfig) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut tr_err = 0.0f64;
    for n in 2..=3 {
        tr_err = tr_err.max((haagerup_norm_sdp(&HaagerupTensor::transpose_tensor(n), cfg.tol)? - n as f64).abs());
    }
    let mut g = rng(cfg, 2);
    let mut gap = 0.0f64;
    for _ in 0..20 {
        let d = g.gen_range(1..=3);
        let r = g.gen_range(1..=4);
        let v = HaagerupTensor::random(d, r, &mut g);
        let sdp = haagerup_norm_sdp(&v, cfg.tol)?;
        let fac = haagerup_norm_factorized(&v, 300, 1e-10)?;
        gap = gap.max((sdp - fac.value).abs());
    }
    Ok(finish(
        2,
        "Haagerup norm equals cb norm of the elementary operator",
        180.0,
        start,
        vec![
            Check::at_most("|h(sum E_ij (x) E_ij) - n|, n = 2, 3", tr_err, 1e-5),
            Check::at_most("|sdp - factorized|, 20 random tensors d <= 3, r <= 4", gap, 1e-4),
        ],
    ))
}

/// Norm and cb norm coincide for scalar multipliers.
pub fn bimodule_equality(cfg: &SuiteConfig) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut g = rng(cfg, 3);
    let mut gap = 0.0f64;
    for _ in 0..20 {
        let n = g.gen_range(1..=8);
        let sym = SchurSymbol::from_scalar(&ComplexMatrix::random(n, n, &mut g), 1)?;
        let r = multiplier_norm_with(&sym, cfg.tol, cfg.restarts, cfg.seed)?;
        gap = gap.max(r.cb - r.norm_lb);
    }
    let h = SchurSymbol::from_scalar(&ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, -1.0])?, 1)?;
    let hr = multiplier_norm_with(&h, cfg.tol, cfg.restarts, cfg.seed)?;
    Ok(finish(
        3,
        "bimodule norm equality",
        120.0,
        start,
        vec![
            Check::at_most("cb - norm_lb, 20 random scalar symbols N <= 8", gap, 1e-3),
            Check::at_most("|cb(Hadamard) - sqrt 2|", (hr.cb - 2f64.sqrt()).abs(), 1e-6),
        ],
    ))
}

fn random_families(g: &mut ChaCha8Rng, n: usize, d: usize, count: usize) -> Vec<BlockMatrix> {
    (0..count).map(|_| BlockMatrix::random(n, d, g)).collect()
}

/// Compression of `Σ R_i T S_i` is the multiplier of the diagonal families.
pub fn compression_identity(cfg: &SuiteConfig) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut g = rng(cfg, 4);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let (n, d, p) = (g.gen_range(1..=5), g.gen_range(1..=3), g.gen_range(1..=4));
        let r = random_families(&mut g, n, d, p);
        let s = random_families(&mut g, n, d, p);
        let rep = diagonal_compression_identity_check(&r, &s, 3, g.gen())?;
        worst = worst.max(rep.symbol_residual).max(rep.action_residual);
    }
    Ok(finish(
        4,
        "diagonal-compression identity",
        30.0,
        start,
        vec![Check::at_most(
            "residual, 50 instances N <= 5, d <= 3, <= 4 pairs",
            worst,
            1e-12,
        )],
    ))
}

/// `‖T_k‖ ≤ ‖k‖₂` and `‖φ·k‖₂ ≤ max cb(φ_mn) · ‖k‖₂`.
pub fn kernel_bounds(cfg: &SuiteConfig) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut g = rng(cfg, 5);
    let (mut op, mut img) = (f64::INFINITY, f64::INFINITY);
    for i in 0..100 {
        let (n, d) = (g.gen_range(1..=4), g.gen_range(1..=3));
        let k = BlockMatrix::random(n, d, &mut g);
        let phi = if i % 2 == 0 {
            SchurSymbol::from_scalar(&ComplexMatrix::random(n, n, &mut g), d)?
        } else {
            SchurSymbol::random(n, d, g.gen_range(1..=3), &mut g)
        };
        let r = kernel_bound_check(&k, &phi, cfg.tol)?;
        op = op.min(r.operator_margin);
        img = img.min(r.image_margin);
    }
    Ok(finish(
        5,
        "kernel bounds",
        30.0,
        start,
        vec![
            Check::at_least("min (||k||_2 - ||T_k||), 100 instances", op, -1e-10),
            Check::at_least("min (max cb(phi_mn) ||k||_2 - ||phi.k||_2), 100 instances", img, -1e-10),
        ],
    ))
}

/// `cb ≤ d · norm` with saturation by the transpose.
pub fn dimension_bound(cfg: &SuiteConfig) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut g = rng(cfg, 6);
    let mut slack = 0.0f64;
    for _ in 0..20 {
        let d = g.gen_range(1..=4);
        let m = LinearMatrixMap::random(d, d, g.gen_range(1..=4), &mut g);
        let r = dim_bound_check(&m, cfg.tol, cfg.restarts, cfg.seed, 1e-3)?;
        slack = slack.max(r.required_slack);
    }
    let mut sat = 0.0f64;
    for d in 2..=4 {
        let r = dim_bound_check(&LinearMatrixMap::transpose(d), cfg.tol, cfg.restarts, cfg.seed, 1e-3)?;
        sat = sat.max((r.ratio - d as f64).abs());
    }
    Ok(finish(
        6,
        "dimension bound",
        120.0,
        start,
        vec![
            Check::at_most(
                "required slack in cb <= d norm (1 + slack), 20 random maps d <= 4",
                slack,
                1e-3,
            ),
            Check::at_most("|cb/norm - d| for the transpose, d = 2..4", sat, 1e-4),
        ],
    ))
}

/// Tails of the diagonal `1/k` symbol and the all-ones symbol, `N = 8`.
pub fn tail_diagnostics(cfg: &SuiteConfig) -> Result<CriterionResult> {
    let start = Instant::now();
    let n = 8;
    let diag = SchurSymbol::from_scalar(
        &ComplexMatrix::from_real_diag(&(1..=n).map(|k| 1.0 / k as f64).collect::<Vec<_>>()),
        1,
    )?;
    let ones = SchurSymbol::from_scalar(&ComplexMatrix::from_fn(n, n, |_, _| crate::matrix::ONE), 1)?;
    let (mut diag_err, mut ones_err) = (0.0f64, 0.0f64);
    for k in 0..n {
        diag_err = diag_err.max((tail_multiplier_norm(&diag, k, cfg.tol)? - 1.0 / (k + 1) as f64).abs());
        ones_err = ones_err.max((tail_multiplier_norm(&ones, k, cfg.tol)? - 1.0).abs());
    }
    Ok(finish(
        7,
        "tail diagnostics",
        120.0,
        start,
        vec![
            Check::at_most("|tail(diag 1/k, n) - 1/(n+1)|, N = 8", diag_err, 1e-6),
            Check::at_most("|tail(all ones, n) - 1|, n < N = 8", ones_err, 1e-6),
        ],
    ))
}

/// Symbol → compression → symbol, and representation → symbol against the double sum.
pub fn round_trips(cfg: &SuiteConfig) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut g = rng(cfg, 8);
    let mut sym_err = 0.0f64;
    for _ in 0..50 {
        let (n, d) = (g.gen_range(1..=4), g.gen_range(1..=3));
        let phi = SchurSymbol::random(n, d, g.gen_range(1..=3), &mut g);
        sym_err = sym_err.max(schur_compression(&phi)?.max_diff(&phi));
    }
    let mut rep_err = 0.0f64;
    for _ in 0..50 {
        let (r, n, d) = (g.gen_range(1..=3), g.gen_range(1..=4), g.gen_range(1..=3));
        let rep = DiagonalRepresentation::random(r, n, d, &mut g);
        let t = BlockMatrix::random(n, d, &mut g);
        let direct = BlockMatrix::from_fn(n, d, |m, k| {
            let mut acc = ComplexMatrix::zeros(d, d);
            for i in 0..r {
                acc += &(&(rep.a(i, m) * t.block(m, k)) * rep.b(i, k));
            }
            acc
        });
        rep_err = rep_err.max(apply_symbol(&representation_to_symbol(&rep), &t)?.max_diff(&direct));
    }
    Ok(finish(
        8,
        "round trips",
        60.0,
        start,
        vec![
            Check::at_most("symbol -> compression -> symbol, 50 instances", sym_err, 1e-12),
            Check::at_most("representation -> symbol vs double sum, 50 instances", rep_err, 1e-12),
        ],
    ))
}

pub type CriterionFn = fn(&SuiteConfig) -> Result<CriterionResult>;

pub const CRITERIA: [CriterionFn; 8] = [
    transpose_dichotomy,
    haagerup_identification,
    bimodule_equality,
    compression_identity,
    kernel_bounds,
    dimension_bound,
    tail_diagnostics,
    round_trips,
];

pub fn run_all(cfg: &SuiteConfig) -> Result<Vec<CriterionResult>> {
    CRITERIA.iter().map(|c| c(cfg)).collect()
}
