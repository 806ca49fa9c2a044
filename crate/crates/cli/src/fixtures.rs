//! The two worked examples and their closed forms, evaluated independently of
//! the counting engine.
//!
//! First example: `(X1X2 + X5X6X7)(X3X4 + X5X6X7) = a`, blocks `{1,2},{3,4},{5,6,7}`.
//! Second example: `(X1 + X6X7X8)(X1 + X2X3 + X6X7X8)(X2X3 + X4X5) = a`,
//! blocks `{1},{2,3},{4,5},{6,7,8}`.

use mlcount_core::exactla::MatrixFq;
use mlcount_core::{make_field, BigCount, CountQuery, FieldElement, FieldSpec, Partition, SystemSpec};
use num_bigint::BigInt;

/// Field `F_q` for a prime power `q`, using the built-in default modulus.
pub fn field_of_order(q: u32) -> Option<FieldSpec> {
    (2..=q as u64).find_map(|p| {
        if !(q as u64).is_multiple_of(p) {
            return None;
        }
        let mut e = 0;
        let mut r = q as u64;
        while r.is_multiple_of(p) {
            r /= p;
            e += 1;
        }
        if r == 1 {
            make_field(p, e, None).ok()
        } else {
            None
        }
    })
}

pub fn first_example(field: &FieldSpec) -> SystemSpec {
    SystemSpec::new(
        field.clone(),
        Partition::consecutive(&[2, 2, 3]).expect("valid partition"),
        MatrixFq::from_indices(&[&[1, 0, 1], &[0, 1, 1]]),
    )
    .expect("full rank")
}

/// Block sizes `(d, d, d)` with the first example's coefficient matrix.
pub fn first_example_scaled(field: &FieldSpec, d: usize) -> SystemSpec {
    SystemSpec::new(
        field.clone(),
        Partition::consecutive(&[d, d, d]).expect("valid partition"),
        MatrixFq::from_indices(&[&[1, 0, 1], &[0, 1, 1]]),
    )
    .expect("full rank")
}

pub fn second_example(field: &FieldSpec) -> SystemSpec {
    SystemSpec::new(
        field.clone(),
        Partition::consecutive(&[1, 2, 2, 3]).expect("valid partition"),
        MatrixFq::from_indices(&[&[1, 0, 0, 1], &[1, 1, 0, 1], &[0, 1, 1, 0]]),
    )
    .expect("full rank")
}

pub fn query(sys: &SystemSpec, a: FieldElement) -> CountQuery {
    CountQuery::new(sys.clone(), a).expect("target in field")
}

fn poly(q: u32, coeffs: &[i64]) -> BigCount {
    // coeffs from the highest power down
    coeffs.iter().fold(BigInt::from(0), |acc, &c| acc * q + c)
}

/// `N(f, 0) = 2q^6 + 3q^5 - 13q^4 + 16q^3 - 9q^2 + 2q`.
pub fn first_zero(q: u32) -> BigCount {
    poly(q, &[2, 3, -13, 16, -9, 2, 0])
}

/// Nonzero square target, odd `q`: `(q-1)^2 q (q^3 + q^2 - 2q + 2)`.
pub fn first_square(q: u32) -> BigCount {
    poly(q, &[1, -1]).pow(2) * q * poly(q, &[1, 1, -2, 2])
}

/// Non-square target, odd `q`: `(q-1)^3 q (q^2 + 2q - 2)`.
pub fn first_nonsquare(q: u32) -> BigCount {
    poly(q, &[1, -1]).pow(3) * q * poly(q, &[1, 2, -2])
}

/// Any nonzero target, even `q`: `(q-1)^2 q (q^3 + q^2 - 3q + 2)`.
///
/// In characteristic 2 the excluded set `{-b, 0, b}` has two elements, not
/// three, which shifts the odd-`q` square form by `-q^2 (q-1)^2`.
pub fn first_even_nonzero(q: u32) -> BigCount {
    poly(q, &[1, -1]).pow(2) * q * poly(q, &[1, 1, -3, 2])
}

/// Closed form for the first example at target `a`, if one applies.
pub fn first_closed_form(field: &FieldSpec, a: FieldElement) -> BigCount {
    let q = field.q();
    if a.is_zero() {
        first_zero(q)
    } else if q.is_multiple_of(2) {
        first_even_nonzero(q)
    } else if field.is_square(a) {
        first_square(q)
    } else {
        first_nonsquare(q)
    }
}

/// `N(f, 0) = 3q^7 - 3q^6 + q^3 (2q^2 - 2q + 1)`.
pub fn second_zero(q: u32) -> BigCount {
    poly(q, &[3, -3, 2, -2, 1, 0, 0, 0])
}

/// `N(f, a) = q^3 sum_{a1, a2 in F_q^*} (q + kappa(a2 - a1)) (q + kappa(a1 - a2 + a / (a1 a2)))`, `a != 0`.
pub fn second_nonzero(field: &FieldSpec, a: FieldElement) -> BigCount {
    assert!(!a.is_zero());
    let q = field.q() as i64;
    let mut total = BigInt::from(0);
    for a1 in field.enumerate(true) {
        for a2 in field.enumerate(true) {
            let first = q + field.kappa(field.sub(a2, a1));
            let quot = field.div(a, field.mul(a1, a2)).expect("nonzero");
            let second = q + field.kappa(field.add(field.sub(a1, a2), quot));
            total += BigInt::from(first * second);
        }
    }
    total * BigInt::from(q).pow(3)
}

pub fn second_closed_form(field: &FieldSpec, a: FieldElement) -> BigCount {
    if a.is_zero() {
        second_zero(field.q())
    } else {
        second_nonzero(field, a)
    }
}
