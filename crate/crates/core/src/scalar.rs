//! The exact integer type that counts are accumulated in.
//!
//! Every formula in this crate is integer-valued, so the only requirement on
//! the scalar is exact signed ring arithmetic. [`BigInt`](num_bigint::BigInt)
//! never overflows; `i128` and `i64` are faster but only safe while `q^n`
//! stays in range (checked with [`CountScalar::fits`]).

use std::fmt::{Debug, Display};

use num_traits::{FromPrimitive, Signed, ToPrimitive};

pub trait CountScalar:
    Clone + Ord + Signed + FromPrimitive + ToPrimitive + Send + Sync + Debug + Display + 'static
{
    /// Largest `log2(q^n)` this type holds without overflow, with headroom
    /// for the inclusion-exclusion intermediates (`2^k` terms of size `q^n`).
    const MAX_BITS: u32;

    fn from_u(v: u64) -> Self {
        Self::from_u64(v).expect("u64 fits every count scalar")
    }

    fn from_i(v: i64) -> Self {
        Self::from_i64(v).expect("i64 fits every count scalar")
    }

    /// `base^exp`.
    fn pow_u(base: u64, exp: u32) -> Self {
        num_traits::pow(Self::from_u(base), exp as usize)
    }

    /// Whether counts over `F_q^n` (and products of up to `extra_bits` more) fit.
    fn fits(q: u32, n: usize, extra_bits: u32) -> bool {
        let bits = (q as f64).log2() * n as f64 + extra_bits as f64;
        bits < Self::MAX_BITS as f64
    }
}

impl CountScalar for i64 {
    const MAX_BITS: u32 = 62;
}

impl CountScalar for i128 {
    const MAX_BITS: u32 = 126;
}

impl CountScalar for num_bigint::BigInt {
    const MAX_BITS: u32 = u32::MAX;
}
