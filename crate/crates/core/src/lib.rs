//! Exact solution counts for `f_1 f_2 .. f_k = a` over `F_q^n`, where every
//! `f_i` is a multilinear polynomial with separated variables
//! `f_i = sum_j a_ij prod_{t in J_j} X_t` over one shared partition
//! `{J_1, .., J_m}` of the variables.
//!
//! The formula path ([`counting`]) reduces every count to sums over the
//! `m - l` free block products instead of the `q^n` points of the space; the
//! brute-force [`oracle`] enumerates the points directly and serves as ground
//! truth. [`codes`] applies the counts to the weight hierarchy of the
//! multilinear code `C(q, n, J)`.
//!
//! Counting routines are generic over the exact integer type they accumulate
//! in (see [`CountScalar`]); [`BigCount`] is the default.

pub mod codes;
pub mod counting;
pub mod exactla;
pub mod gf;
pub mod model;
pub mod oracle;
pub mod par;
pub mod sample;
mod scalar;

pub use gf::{make_field, FieldElement, FieldSpec};
pub use model::{CountQuery, Partition, SystemSpec};
pub use scalar::CountScalar;

/// Arbitrary-precision count; every public count defaults to this.
pub type BigCount = num_bigint::BigInt;
/// Fixed-width count for instances with `q^n < 2^120`.
pub type Count128 = i128;
/// Fixed-width count for instances with `q^n < 2^56`.
pub type Count64 = i64;
