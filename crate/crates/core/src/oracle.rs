//! Brute-force ground truth: evaluate `f` at every point of `F_q^n`.
//!
//! This module is deliberately naive. Its only optimization is computing each
//! block product once per point and sharing it across the `k` rows.

use crate::counting::CountError;
use crate::gf::FieldElement;
use crate::model::{CountQuery, SystemSpec};
use crate::par::{Exec, Odometer};
use crate::scalar::CountScalar;

/// Default guard: at most `2^26` points.
pub const ORACLE_LIMIT_BITS: u32 = 26;

#[derive(Debug, Clone, Copy, Default)]
pub struct OracleOptions {
    /// Skip the size guard.
    pub force: bool,
    pub exec: Exec,
}

impl OracleOptions {
    pub fn forced(exec: Exec) -> Self {
        OracleOptions { force: true, exec }
    }
}

/// Number of points in `F_q^n`, or `OracleTooLarge`.
pub fn point_count(sys: &SystemSpec, force: bool) -> Result<u64, CountError> {
    let too_large = CountError::OracleTooLarge {
        q: sys.q(),
        n: sys.n(),
        limit_bits: ORACLE_LIMIT_BITS,
    };
    let points = (sys.q() as u64).checked_pow(sys.n() as u32).ok_or(too_large.clone())?;
    if !force && points > 1 << ORACLE_LIMIT_BITS {
        return Err(too_large);
    }
    Ok(points)
}

/// Calls `visit(row_values)` for every point in the flat index range.
fn for_each_point<F>(sys: &SystemSpec, range: std::ops::Range<u64>, mut visit: F)
where
    F: FnMut(&[FieldElement]),
{
    let field = sys.field();
    let part = sys.partition();
    let a = sys.matrix();
    let mut od = Odometer::starting_at(sys.n(), sys.q(), range.start);
    let mut blocks = vec![FieldElement::ZERO; sys.m()];
    let mut rows = vec![FieldElement::ZERO; sys.k()];
    for _ in range {
        let x = od.digits();
        for (j, b) in blocks.iter_mut().enumerate() {
            *b = part
                .block(j)
                .iter()
                .fold(FieldElement::ONE, |acc, &v| field.mul(acc, FieldElement::from_index(x[v])));
        }
        for (i, r) in rows.iter_mut().enumerate() {
            *r = a
                .row(i)
                .iter()
                .zip(&blocks)
                .fold(FieldElement::ZERO, |acc, (&c, &p)| field.add(acc, field.mul(c, p)));
        }
        visit(&rows);
        od.advance();
    }
}

/// For each `a in F_q` (by index), the number of `x` with `f(x) = a`.
pub fn value_distribution<Z: CountScalar>(sys: &SystemSpec, opts: OracleOptions) -> Result<Vec<Z>, CountError> {
    let points = point_count(sys, opts.force)?;
    let q = sys.q() as usize;
    let field = sys.field();
    let parts = opts.exec.map_chunks(points, |range| {
        let mut hist = vec![0u64; q];
        for_each_point(sys, range, |rows| {
            let f = rows.iter().fold(FieldElement::ONE, |acc, &r| field.mul(acc, r));
            hist[f.index() as usize] += 1;
        });
        hist
    });
    let mut hist = vec![0u64; q];
    for part in parts {
        for (h, x) in hist.iter_mut().zip(part) {
            *h += x;
        }
    }
    Ok(hist.into_iter().map(Z::from_u).collect())
}

/// Number of `x in F_q^n` with `f_1(x) .. f_k(x) = a`. No rank assumption.
pub fn brute_count<Z: CountScalar>(query: &CountQuery, opts: OracleOptions) -> Result<Z, CountError> {
    let sys = &query.system;
    let points = point_count(sys, opts.force)?;
    let field = sys.field();
    let target = query.target;
    let total: u64 = opts.exec.sum_range(points, |range| {
        let mut hits = 0u64;
        for_each_point(sys, range, |rows| {
            if rows.iter().fold(FieldElement::ONE, |acc, &r| field.mul(acc, r)) == target {
                hits += 1;
            }
        });
        hits
    });
    Ok(Z::from_u(total))
}

/// Number of common solutions of `f_{rows[t]}(x) = b[t]`.
pub fn brute_count_system<Z: CountScalar>(
    sys: &SystemSpec,
    rows: &[usize],
    b: &[FieldElement],
    opts: OracleOptions,
) -> Result<Z, CountError> {
    if rows.len() != b.len() || rows.iter().any(|&r| r >= sys.k()) {
        return Err(CountError::Invalid("row set and right-hand side do not match the system".into()));
    }
    let points = point_count(sys, opts.force)?;
    let total: u64 = opts.exec.sum_range(points, |range| {
        let mut hits = 0u64;
        for_each_point(sys, range, |vals| {
            if rows.iter().zip(b).all(|(&r, &t)| vals[r] == t) {
                hits += 1;
            }
        });
        hits
    });
    Ok(Z::from_u(total))
}
