//! Formula-path solution counts.
//!
//! Every count reduces to products of block counts: for a block of `d`
//! variables, the number of `d`-tuples whose product equals `w` is
//! `(q-1)^(d-1)` when `w != 0` and `q^d - (q-1)^d` when `w = 0`. A system of
//! `l` rows of rank `l` is solved for `l` pivot block products in terms of the
//! `m - l` free block products, so the count is a sum over `F_q^(m-l)` value
//! tuples rather than over the `q^|free variables|` points.
//!
//! All arithmetic is exact; the rational-looking factor
//! `q^(d-1) (1 - ((q-1)/q)^(d-1))` is always evaluated as `q^(d-1) - (q-1)^(d-1)`.

mod dispatch;
mod special;

pub use dispatch::{count, CountOptions, CountOutcome, Method, MethodUsed};
pub use special::{count_special_diag, count_special_mk, count_two_factor, is_diagonal_shape};

use thiserror::Error;

use crate::exactla::{self, LinAlgError, MatrixFq, SubmatrixChoice};
use crate::gf::{FieldElement, FieldSpec};
use crate::model::{ModelError, Partition, SystemSpec};
use crate::par::{Exec, Odometer};
use crate::scalar::CountScalar;

/// Upper bound on `q^(m-l)` value tuples in one system count.
pub const MAX_TUPLES: u64 = 1 << 36;

/// Upper bound on points enumerated by the literal pointwise sum.
pub const MAX_POINTWISE: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error("rows have rank {rank} < {rows}; the formula path needs full row rank")]
    RankDeficient { rank: usize, rows: usize },
    #[error("k = {k} factors exceed m = {m} blocks")]
    Dimension { k: usize, m: usize },
    #[error("target is zero; use the inclusion-exclusion path")]
    ZeroTarget,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("oracle would enumerate {q}^{n} points, above the 2^{limit_bits} guard")]
    OracleTooLarge { q: u32, n: usize, limit_bits: u32 },
    #[error("work guard exceeded: {0}")]
    TooLarge(String),
    #[error("count scalar too narrow for q = {q}, n = {n}")]
    ScalarOverflow { q: u32, n: usize },
    #[error("invalid argument: {0}")]
    Invalid(String),
}

impl From<LinAlgError> for CountError {
    fn from(e: LinAlgError) -> Self {
        match e {
            LinAlgError::RankDeficient { rank, rows } => CountError::RankDeficient { rank, rows },
            LinAlgError::Singular => CountError::RankDeficient { rank: 0, rows: 0 },
            other => CountError::Invalid(other.to_string()),
        }
    }
}

impl From<ModelError> for CountError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Rank { rank, k } => CountError::RankDeficient { rank, rows: k },
            ModelError::Dimension { k, m } => CountError::Dimension { k, m },
            other => CountError::Invalid(other.to_string()),
        }
    }
}

/// Count distribution of `prod_{t=1..d} X_t` over `F_q^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDistribution<Z> {
    pub block_size: usize,
    pub q: u32,
    pub count_zero: Z,
    pub count_each_nonzero: Z,
}

impl<Z: CountScalar> BlockDistribution<Z> {
    pub fn new(block_size: usize, q: u32) -> Self {
        assert!(block_size >= 1);
        let d = block_size as u32;
        let q64 = q as u64;
        BlockDistribution {
            block_size,
            q,
            count_zero: Z::pow_u(q64, d) - Z::pow_u(q64 - 1, d),
            count_each_nonzero: Z::pow_u(q64 - 1, d - 1),
        }
    }

    #[inline]
    pub fn count(&self, w_is_zero: bool) -> &Z {
        if w_is_zero {
            &self.count_zero
        } else {
            &self.count_each_nonzero
        }
    }
}

/// Number of `(X_1, .., X_d) in F_q^d` with `alpha * prod X_t = w` for any
/// `alpha != 0`; depends on `w` only through `w == 0`.
pub fn block_product_count<Z: CountScalar>(d: usize, w_is_zero: bool, field: &FieldSpec) -> Z {
    BlockDistribution::<Z>::new(d, field.q()).count(w_is_zero).clone()
}

/// `q^(d-1) - (q-1)^(d-1)`, the integer form of `q^(d-1) (1 - ((q-1)/q)^(d-1))`.
pub(crate) fn defect<Z: CountScalar>(q: u32, d: usize) -> Z {
    let e = d as u32 - 1;
    Z::pow_u(q as u64, e) - Z::pow_u(q as u64 - 1, e)
}

/// Block count in the kappa form `q^(d-1) + kappa(w) (q^(d-1) - (q-1)^(d-1))`.
pub fn block_product_count_kappa<Z: CountScalar>(d: usize, w: FieldElement, field: &FieldSpec) -> Z {
    let q = field.q();
    Z::pow_u(q as u64, d as u32 - 1) + Z::from_i(field.kappa(w)) * defect::<Z>(q, d)
}

/// Field, block sizes and coefficient matrix: everything a count depends on.
#[derive(Clone, Copy)]
pub(crate) struct Layout<'a> {
    pub field: &'a FieldSpec,
    pub sizes: &'a [usize],
    pub n: usize,
    pub matrix: &'a MatrixFq,
}

impl<'a> Layout<'a> {
    pub fn of(sys: &'a SystemSpec) -> Self {
        Layout {
            field: sys.field(),
            sizes: sys.partition().block_sizes(),
            n: sys.n(),
            matrix: sys.matrix(),
        }
    }

    pub fn with_matrix(field: &'a FieldSpec, partition: &'a Partition, matrix: &'a MatrixFq) -> Self {
        Layout {
            field,
            sizes: partition.block_sizes(),
            n: partition.n(),
            matrix,
        }
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    pub fn k(&self) -> usize {
        self.matrix.rows()
    }

    pub fn m(&self) -> usize {
        self.sizes.len()
    }

    pub fn distributions<Z: CountScalar>(&self) -> Vec<BlockDistribution<Z>> {
        self.sizes
            .iter()
            .map(|&d| BlockDistribution::new(d, self.q()))
            .collect()
    }

    pub fn check_scalar<Z: CountScalar>(&self) -> Result<(), CountError> {
        // inclusion-exclusion adds up to 2^k terms of size q^n
        if Z::fits(self.q(), self.n, self.k() as u32 + 2) {
            Ok(())
        } else {
            Err(CountError::ScalarOverflow {
                q: self.q(),
                n: self.n,
            })
        }
    }
}

fn check_target(field: &FieldSpec, a: FieldElement) -> Result<(), CountError> {
    if field.contains(a) {
        Ok(())
    } else {
        Err(CountError::Invalid(format!(
            "element {} is not in F_{}",
            a.index(),
            field.q()
        )))
    }
}

/// Number of solutions of `f_row = a`, by the closed single-row formula
/// `q^(n-1) + kappa(a) q^(n-1) prod_{l: A[row][l] != 0} (1 - ((q-1)/q)^(|J_l|-1))`.
///
/// A zero row gives the empty product 1, i.e. `q^n` solutions for `a = 0`.
pub fn count_single<Z: CountScalar>(sys: &SystemSpec, row: usize, a: FieldElement) -> Result<Z, CountError> {
    let lay = Layout::of(sys);
    if row >= lay.k() {
        return Err(CountError::Invalid(format!("row {row} out of range")));
    }
    check_target(lay.field, a)?;
    lay.check_scalar::<Z>()?;
    Ok(single_row(lay, row, a))
}

pub(crate) fn single_row<Z: CountScalar>(lay: Layout<'_>, row: usize, a: FieldElement) -> Z {
    let q = lay.q();
    let base = Z::pow_u(q as u64, lay.n as u32 - 1);
    base.clone() + Z::from_i(lay.field.kappa(a)) * support_product::<Z>(lay, lay.matrix.row(row))
}

/// `q^(n-1) prod_{l: coeffs[l] != 0} (1 - ((q-1)/q)^(|J_l|-1))` as an integer.
pub(crate) fn support_product<Z: CountScalar>(lay: Layout<'_>, coeffs: &[FieldElement]) -> Z {
    let q = lay.q();
    let mut exp = lay.n as u32 - 1;
    let mut acc = Z::one();
    for (l, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let d = lay.sizes[l];
        exp -= d as u32 - 1;
        acc = acc * defect::<Z>(q, d);
    }
    acc * Z::pow_u(q as u64, exp)
}

/// Number of common solutions of `f_{rows[t]} = b[t]`, `t = 1..l`.
///
/// Rows must be distinct, increasing, and of full rank. The canonical
/// (lexicographically smallest) pivot columns are used.
pub fn count_system<Z: CountScalar>(
    sys: &SystemSpec,
    rows: &[usize],
    b: &[FieldElement],
) -> Result<Z, CountError> {
    count_system_exec(sys, rows, b, Exec::sequential())
}

pub fn count_system_exec<Z: CountScalar>(
    sys: &SystemSpec,
    rows: &[usize],
    b: &[FieldElement],
    exec: Exec,
) -> Result<Z, CountError> {
    let lay = Layout::of(sys);
    system_count(lay, rows, b, exec)
}

pub(crate) fn system_count<Z: CountScalar>(
    lay: Layout<'_>,
    rows: &[usize],
    b: &[FieldElement],
    exec: Exec,
) -> Result<Z, CountError> {
    if rows.len() != b.len() {
        return Err(CountError::Invalid(format!(
            "{} rows but {} right-hand sides",
            rows.len(),
            b.len()
        )));
    }
    if rows.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CountError::Invalid("rows must be strictly increasing".into()));
    }
    for &x in b {
        check_target(lay.field, x)?;
    }
    lay.check_scalar::<Z>()?;
    if rows.is_empty() {
        return Ok(Z::pow_u(lay.q() as u64, lay.n as u32));
    }
    let choice = exactla::choose_submatrix(lay.field, lay.matrix, rows)?;
    system_count_with_choice(lay, &choice, b, exec)
}

/// Same count for an explicit (possibly non-canonical) pivot choice.
pub fn count_system_with_choice<Z: CountScalar>(
    sys: &SystemSpec,
    choice: &SubmatrixChoice,
    b: &[FieldElement],
) -> Result<Z, CountError> {
    let lay = Layout::of(sys);
    lay.check_scalar::<Z>()?;
    system_count_with_choice(lay, choice, b, Exec::sequential())
}

fn tuple_count(q: u32, len: usize) -> Result<u64, CountError> {
    (q as u64)
        .checked_pow(len as u32)
        .filter(|&t| t <= MAX_TUPLES)
        .ok_or_else(|| CountError::TooLarge(format!("{q}^{len} free-block value tuples")))
}

/// Collapsed sum: walk the free block values `v in F_q^(m-l)`, tally how often
/// each (zero pattern of `v`, zero pattern of the forced pivot values) pair
/// occurs, then weight each pattern by its block counts.
pub(crate) fn system_count_with_choice<Z: CountScalar>(
    lay: Layout<'_>,
    choice: &SubmatrixChoice,
    b: &[FieldElement],
    exec: Exec,
) -> Result<Z, CountError> {
    let field = lay.field;
    let l = choice.l();
    let free = &choice.complement_cols;
    let nfree = free.len();
    if l + nfree > 20 {
        return Err(CountError::TooLarge(format!("{} blocks", l + nfree)));
    }
    let rhs = choice.rhs(field, b);
    let tuples = tuple_count(lay.q(), nfree)?;
    let sigma = &choice.sigma;
    let q = lay.q();

    let partial = exec.map_chunks(tuples, |range| {
        let mut tally = vec![0u64; 1 << (l + nfree)];
        let mut od = Odometer::starting_at(nfree, q, range.start);
        for _ in range {
            let v = od.digits();
            let mut mask = 0usize;
            for (j, &x) in v.iter().enumerate() {
                if x == 0 {
                    mask |= 1 << j;
                }
            }
            for t in 0..l {
                let mut acc = rhs[t];
                for (j, &x) in v.iter().enumerate() {
                    if x != 0 {
                        acc = field.sub(acc, field.mul(sigma.get(t, j), FieldElement::from_index(x)));
                    }
                }
                if acc.is_zero() {
                    mask |= 1 << (nfree + t);
                }
            }
            tally[mask] += 1;
            od.advance();
        }
        tally
    });

    let mut tally = vec![0u64; 1 << (l + nfree)];
    for part in partial {
        for (acc, x) in tally.iter_mut().zip(part) {
            *acc += x;
        }
    }

    let dists = lay.distributions::<Z>();
    let mut total = Z::zero();
    for (mask, &hits) in tally.iter().enumerate() {
        if hits == 0 {
            continue;
        }
        let mut term = Z::from_u(hits);
        for (j, &col) in free.iter().enumerate() {
            term = term * dists[col].count(mask >> j & 1 == 1).clone();
        }
        for (t, &col) in choice.col_set.iter().enumerate() {
            term = term * dists[col].count(mask >> (nfree + t) & 1 == 1).clone();
        }
        total = total + term;
    }
    Ok(total)
}

/// Literal pointwise form of the system count: sum over every assignment of
/// the free variables `I_nu'` of `prod_t (q^(d_t-1) + kappa(w_t) (q^(d_t-1) - (q-1)^(d_t-1)))`.
/// Exponential in the number of free variables; kept as a cross-check.
pub fn count_system_pointwise<Z: CountScalar>(
    sys: &SystemSpec,
    rows: &[usize],
    b: &[FieldElement],
) -> Result<Z, CountError> {
    let lay = Layout::of(sys);
    lay.check_scalar::<Z>()?;
    let field = lay.field;
    if rows.is_empty() {
        return Ok(Z::pow_u(lay.q() as u64, lay.n as u32));
    }
    let choice = exactla::choose_submatrix(field, lay.matrix, rows)?;
    let rhs = choice.rhs(field, b);
    let part = sys.partition();
    let free_vars = choice.free_support(part);
    let points = (lay.q() as u64)
        .checked_pow(free_vars.len() as u32)
        .filter(|&p| p <= MAX_POINTWISE)
        .ok_or_else(|| CountError::TooLarge(format!("{} free variables", free_vars.len())))?;

    let mut slot = vec![usize::MAX; lay.n];
    for (i, &x) in free_vars.iter().enumerate() {
        slot[x] = i;
    }
    let mut od = Odometer::starting_at(free_vars.len(), lay.q(), 0);
    let mut total = Z::zero();
    for _ in 0..points {
        let x = od.digits();
        let v: Vec<FieldElement> = choice
            .complement_cols
            .iter()
            .map(|&j| {
                part.block(j).iter().fold(FieldElement::ONE, |acc, &var| {
                    field.mul(acc, FieldElement::from_index(x[slot[var]]))
                })
            })
            .collect();
        let mut term = Z::one();
        for (t, &col) in choice.col_set.iter().enumerate() {
            let mut w = rhs[t];
            for (j, &vj) in v.iter().enumerate() {
                w = field.sub(w, field.mul(choice.sigma.get(t, j), vj));
            }
            term = term * block_product_count_kappa::<Z>(lay.sizes[col], w, field);
        }
        total = total + term;
        od.advance();
    }
    Ok(total)
}

/// `N(f, 0)` by inclusion-exclusion over row subsets:
/// `sum_{S != {}} (-1)^(|S|+1) N(f_S, 0)`, singletons by the closed formula.
pub fn count_product_zero<Z: CountScalar>(sys: &SystemSpec, exec: Exec) -> Result<Z, CountError> {
    sys.require_full_rank()?;
    let lay = Layout::of(sys);
    lay.check_scalar::<Z>()?;
    product_zero(lay, exec)
}

pub(crate) fn product_zero<Z: CountScalar>(lay: Layout<'_>, exec: Exec) -> Result<Z, CountError> {
    let k = lay.k();
    if k > 16 {
        return Err(CountError::TooLarge(format!("k = {k} factors (limit 16)")));
    }
    let mut total = Z::zero();
    for i in 0..k {
        total = total + single_row::<Z>(lay, i, FieldElement::ZERO);
    }
    for size in 2..=k {
        let mut layer = Z::zero();
        for rows in exactla::combinations(k, size) {
            let zeros = vec![FieldElement::ZERO; size];
            layer = layer + system_count::<Z>(lay, &rows, &zeros, exec)?;
        }
        total = if size % 2 == 0 { total - layer } else { total + layer };
    }
    Ok(total)
}

/// `N(f, a)` for `a != 0` as the sum over factorizations `a_1 .. a_k = a` of
/// the system count `N(f_1, .., f_k, a_1, .., a_k)`. The first `k - 1`
/// factors range over `F_q^*` and the last is forced.
pub fn count_product_nonzero<Z: CountScalar>(
    sys: &SystemSpec,
    a: FieldElement,
    exec: Exec,
) -> Result<Z, CountError> {
    sys.require_full_rank()?;
    let lay = Layout::of(sys);
    check_target(lay.field, a)?;
    lay.check_scalar::<Z>()?;
    product_nonzero(lay, a, exec)
}

pub(crate) fn product_nonzero<Z: CountScalar>(
    lay: Layout<'_>,
    a: FieldElement,
    exec: Exec,
) -> Result<Z, CountError> {
    if a.is_zero() {
        return Err(CountError::ZeroTarget);
    }
    let field = lay.field;
    let k = lay.k();
    let rows: Vec<usize> = (0..k).collect();
    let choice = exactla::choose_submatrix(field, lay.matrix, &rows)?;
    let radix = lay.q() - 1;
    let factorizations = (radix as u64)
        .checked_pow(k as u32 - 1)
        .filter(|&t| t <= MAX_TUPLES)
        .ok_or_else(|| CountError::TooLarge(format!("{radix}^{} factorizations", k - 1)))?;

    let parts = exec.map_chunks(factorizations, |range| -> Result<Z, CountError> {
        let mut od = Odometer::starting_at(k - 1, radix, range.start);
        let mut b = vec![FieldElement::ZERO; k];
        let mut acc = Z::zero();
        for _ in range {
            let mut prod = FieldElement::ONE;
            for (t, &d) in od.digits().iter().enumerate() {
                b[t] = FieldElement::from_index(d + 1);
                prod = field.mul(prod, b[t]);
            }
            b[k - 1] = field.div(a, prod).expect("product of nonzero factors");
            acc = acc + system_count_with_choice::<Z>(lay, &choice, &b, Exec::sequential())?;
            od.advance();
        }
        Ok(acc)
    });
    parts.into_iter().try_fold(Z::zero(), |acc, p| Ok(acc + p?))
}

/// `N(f, a)` by the general formula path, routing `a = 0` to inclusion-exclusion.
pub fn count_formula<Z: CountScalar>(sys: &SystemSpec, a: FieldElement, exec: Exec) -> Result<Z, CountError> {
    if a.is_zero() {
        count_product_zero(sys, exec)
    } else {
        count_product_nonzero(sys, a, exec)
    }
}
