//! Truncated Schur multipliers with map-valued symbols: application,
//! compression of block maps to their Schur part, diagonal representations
//! and multiplier norms.

mod compression;
mod norms;
mod representation;
mod symbol;

pub use compression::{
    diagonal_compression_identity_check, diagonal_expectation, diagonal_expectation_n, schur_compression,
    two_sided_map, BlockMap, CompressionIdentityReport, TwoSidedMap,
};
pub use norms::{
    corner_tail_multiplier_norm, corner_zeroed_symbol, counterexample_report, kernel_bound_check, multiplier_norm,
    multiplier_norm_with, scalar_factorization, tail_multiplier_norm, tail_report, tail_symbol, CounterexampleRow,
    KernelBoundReport, MultiplierNorm, NormMethod, ScalarFactorization, TailRow,
};
pub use representation::{
    representation_bound, representation_decay_report, representation_to_symbol, DecayReport, DiagonalRepresentation,
};
pub use symbol::{apply_symbol, SchurSymbol, SCALAR_TOL};

#[cfg(test)]
mod tests;
