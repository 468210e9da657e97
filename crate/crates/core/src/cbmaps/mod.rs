//! Linear maps between matrix algebras, their operator norms (as certified
//! lower bounds) and completely bounded norms (by semidefinite programming).

mod map;
mod norms;

pub use map::{LinearMatrixMap, PAIR_CUTOFF};
pub use norms::{
    amplification_profile, cb_norm, cb_norm_detailed, cb_norm_via_amplification, dim_bound_check, norm_lower,
    norm_lower_detailed, AscentResult, CbNormReport, DimBoundReport, DEFAULT_RESTARTS,
};
