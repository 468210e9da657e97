//! Finite tensors `Σ a_k ⊗ b_k`, their elementary operators and the
//! Haagerup norm, computed by SDP and by optimising over representations.

mod factorized;
mod tensor;

pub use factorized::{haagerup_norm_factorized, FactorizedNorm, FACTORIZED_RESTARTS};
pub use tensor::{col_norm, elementary_operator, haagerup_norm_sdp, minimal_length, row_norm, HaagerupTensor};
