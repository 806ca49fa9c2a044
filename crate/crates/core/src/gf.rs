//! Arithmetic in `F_q = F_p[x] / (modulus)`.
//!
//! Elements are stored as integer indices in `[0, q)`: the index is the
//! little-endian base-`p` encoding of the coefficient vector `(c_0, .., c_{e-1})`
//! of `c_0 + c_1 x + .. + c_{e-1} x^{e-1}`. Index 0 is zero and index 1 is one,
//! so tuples over `F_q^n` can be walked as plain mixed-radix counters.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported field size.
pub const MAX_FIELD_SIZE: u64 = 1 << 20;

/// Fields up to this size get log/antilog tables.
const LOG_TABLE_LIMIT: u32 = 1 << 16;

/// Fields up to this size (with `e > 1`, odd `p`) get a full addition table.
const ADD_TABLE_LIMIT: u32 = 1 << 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of size {p}^{e} exceeds the supported maximum 2^20")]
    FieldTooLarge { p: u64, e: u64 },
    #[error("modulus is reducible over F_{p}")]
    ReducibleModulus { p: u32 },
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("no built-in modulus for F_{p}^{e}; supply one")]
    MissingModulus { p: u32, e: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("element index {index} does not belong to a field of size {q}")]
    FieldMismatch { index: u64, q: u32 },
    #[error("operation {op:?} takes {expected} operand(s), got {got}")]
    Arity {
        op: ArithOp,
        expected: usize,
        got: usize,
    },
}

/// A field element, identified by its canonical index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Wraps a raw index without checking it against any field.
    #[inline]
    pub const fn from_index(index: u32) -> Self {
        FieldElement(index)
    }

    #[inline]
    pub const fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Serialized form of a field: `{"p": 2, "e": 3, "modulus": [1,1,0,1]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDescriptor {
    pub p: u64,
    #[serde(default = "one")]
    pub e: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
}

fn one() -> u64 {
    1
}

/// The operations accepted by [`FieldSpec::apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Neg,
    Inv,
    Div,
    /// Exponent is the index of the second operand, read as an integer.
    Pow,
}

struct LogTables {
    /// `exp[i] = g^i` for `i in 0..2(q-1)`.
    exp: Vec<u32>,
    /// `log[g^i] = i`; `log[0]` is unused.
    log: Vec<u32>,
}

struct FieldInner {
    p: u32,
    e: u32,
    q: u32,
    /// Monic modulus, `e + 1` coefficients, lowest degree first. `[0, 1]` when `e == 1`.
    modulus: Vec<u32>,
    /// `pow_p[i] = p^i`.
    pow_p: Vec<u32>,
    logs: Option<LogTables>,
    add_table: Option<Vec<u32>>,
    primitive: FieldElement,
}

/// A validated finite field. Cheap to clone; immutable after construction.
#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<FieldInner>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p())
            .field("e", &self.e())
            .field("modulus", &self.inner.modulus)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for FieldSpec {}

/// Built-in moduli for the non-prime fields with `q <= 32` (Conway polynomials).
fn builtin_modulus(p: u32, e: u32) -> Option<&'static [u32]> {
    Some(match (p, e) {
        (2, 2) => &[1, 1, 1],
        (2, 3) => &[1, 1, 0, 1],
        (2, 4) => &[1, 1, 0, 0, 1],
        (2, 5) => &[1, 0, 1, 0, 0, 1],
        (3, 2) => &[2, 2, 1],
        (3, 3) => &[1, 2, 0, 1],
        (5, 2) => &[2, 4, 1],
        _ => return None,
    })
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Remainder of `num` modulo the monic polynomial `den` over `F_p` (coefficients low first).
fn poly_rem(num: &[u32], den: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = num.to_vec();
    let dd = den.len() - 1;
    debug_assert_eq!(den[dd], 1);
    while r.len() > dd {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dd;
        if lead != 0 {
            for (i, &c) in den.iter().enumerate() {
                let t = (lead as u64 * c as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - t) % p;
            }
        }
        r.pop();
    }
    r
}

/// Irreducibility by exhaustive trial division by every monic polynomial of
/// degree `1..=deg/2`. The size guard keeps this at most ~2^10 divisions.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let deg = modulus.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                g.push((c % p as u64) as u32);
                c /= p as u64;
            }
            g.push(1);
            if poly_rem(modulus, &g, p).iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

/// Validates `(p, e, modulus)` and builds the field.
pub fn make_field(p: u64, e: u64, modulus: Option<&[u64]>) -> Result<FieldSpec, GfError> {
    if !is_prime(p) {
        return Err(GfError::NotPrime(p));
    }
    if e == 0 {
        return Err(GfError::ZeroDegree);
    }
    let too_large = GfError::FieldTooLarge { p, e };
    if e > 20 {
        return Err(too_large);
    }
    let q = p.checked_pow(e as u32).ok_or(too_large.clone())?;
    if q > MAX_FIELD_SIZE {
        return Err(too_large);
    }
    let (p, e, q) = (p as u32, e as u32, q as u32);

    let modulus: Vec<u32> = if e == 1 {
        vec![0, 1]
    } else {
        let m: Vec<u32> = match modulus {
            Some(m) => {
                if m.len() != e as usize + 1 {
                    return Err(GfError::InvalidModulus(format!(
                        "expected {} coefficients, got {}",
                        e + 1,
                        m.len()
                    )));
                }
                if let Some(&c) = m.iter().find(|&&c| c >= p as u64) {
                    return Err(GfError::InvalidModulus(format!(
                        "coefficient {c} is not reduced mod {p}"
                    )));
                }
                m.iter().map(|&c| c as u32).collect()
            }
            None => builtin_modulus(p, e)
                .ok_or(GfError::MissingModulus { p, e })?
                .to_vec(),
        };
        if m[e as usize] != 1 {
            return Err(GfError::InvalidModulus("modulus must be monic".into()));
        }
        if !is_irreducible(&m, p) {
            return Err(GfError::ReducibleModulus { p });
        }
        m
    };

    let mut pow_p = Vec::with_capacity(e as usize + 1);
    let mut acc = 1u32;
    for _ in 0..=e {
        pow_p.push(acc);
        acc = acc.saturating_mul(p);
    }

    let mut inner = FieldInner {
        p,
        e,
        q,
        modulus,
        pow_p,
        logs: None,
        add_table: None,
        primitive: FieldElement::ONE,
    };
    inner.primitive = find_primitive(&inner);
    if q <= LOG_TABLE_LIMIT {
        inner.logs = Some(build_logs(&inner));
    }
    if e > 1 && p != 2 && q <= ADD_TABLE_LIMIT {
        let mut t = vec![0u32; (q * q) as usize];
        for a in 0..q {
            for b in 0..q {
                t[(a * q + b) as usize] = add_digits(&inner, a, b);
            }
        }
        inner.add_table = Some(t);
    }
    Ok(FieldSpec {
        inner: Arc::new(inner),
    })
}

fn add_digits(f: &FieldInner, a: u32, b: u32) -> u32 {
    let (mut a, mut b) = (a, b);
    let mut out = 0;
    for i in 0..f.e as usize {
        let s = (a % f.p + b % f.p) % f.p;
        out += s * f.pow_p[i];
        a /= f.p;
        b /= f.p;
    }
    out
}

fn digits(f: &FieldInner, mut a: u32) -> Vec<u32> {
    let mut d = Vec::with_capacity(f.e as usize);
    for _ in 0..f.e {
        d.push(a % f.p);
        a /= f.p;
    }
    d
}

fn undigits(f: &FieldInner, d: &[u32]) -> u32 {
    d.iter().zip(&f.pow_p).map(|(&c, &w)| c * w).sum()
}

/// Schoolbook product modulo the field modulus.
fn mul_poly(f: &FieldInner, a: u32, b: u32) -> u32 {
    if f.e == 1 {
        return (a as u64 * b as u64 % f.p as u64) as u32;
    }
    let (da, db) = (digits(f, a), digits(f, b));
    let mut prod = vec![0u32; 2 * f.e as usize - 1];
    for (i, &x) in da.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % f.p as u64) as u32;
        }
    }
    let mut r = poly_rem(&prod, &f.modulus, f.p);
    r.resize(f.e as usize, 0);
    undigits(f, &r)
}

fn pow_slow(f: &FieldInner, base: u32, mut exp: u64) -> u32 {
    let mut acc = 1u32;
    let mut b = base;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_poly(f, acc, b);
        }
        b = mul_poly(f, b, b);
        exp >>= 1;
    }
    acc
}

fn find_primitive(f: &FieldInner) -> FieldElement {
    let order = (f.q - 1) as u64;
    let factors = prime_factors(order);
    for g in 1..f.q {
        if factors.iter().all(|&r| pow_slow(f, g, order / r) != 1) {
            return FieldElement(g);
        }
    }
    unreachable!("every finite field has a primitive element")
}

fn build_logs(f: &FieldInner) -> LogTables {
    let n = (f.q - 1) as usize;
    let mut exp = vec![0u32; 2 * n.max(1)];
    let mut log = vec![0u32; f.q as usize];
    let mut x = 1u32;
    for i in 0..n {
        exp[i] = x;
        log[x as usize] = i as u32;
        x = mul_poly(f, x, f.primitive.0);
    }
    for i in n..2 * n {
        exp[i] = exp[i - n];
    }
    LogTables { exp, log }
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self, GfError> {
        make_field(p, 1, None)
    }

    pub fn from_descriptor(d: &FieldDescriptor) -> Result<Self, GfError> {
        make_field(d.p, d.e, d.modulus.as_deref())
    }

    /// The descriptor that rebuilds this field. The modulus is echoed only for `e > 1`.
    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.p() as u64,
            e: self.e() as u64,
            modulus: (self.e() > 1).then(|| self.inner.modulus.iter().map(|&c| c as u64).collect()),
        }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.inner.p
    }

    #[inline]
    pub fn e(&self) -> u32 {
        self.inner.e
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.inner.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    #[inline]
    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    #[inline]
    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// Checked conversion from an index.
    pub fn element(&self, index: u64) -> Result<FieldElement, GfError> {
        if index < self.q() as u64 {
            Ok(FieldElement(index as u32))
        } else {
            Err(GfError::FieldMismatch {
                index,
                q: self.q(),
            })
        }
    }

    #[inline]
    pub fn contains(&self, a: FieldElement) -> bool {
        a.0 < self.q()
    }

    /// Coefficients `(c_0, .., c_{e-1})` of `a` over `F_p`.
    pub fn coefficients(&self, a: FieldElement) -> Vec<u32> {
        digits(&self.inner, a.0)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let f = &*self.inner;
        FieldElement(if f.e == 1 {
            let s = a.0 + b.0;
            if s >= f.p {
                s - f.p
            } else {
                s
            }
        } else if f.p == 2 {
            a.0 ^ b.0
        } else if let Some(t) = &f.add_table {
            t[(a.0 * f.q + b.0) as usize]
        } else {
            add_digits(f, a.0, b.0)
        })
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let f = &*self.inner;
        if a.0 == 0 || f.p == 2 {
            return a;
        }
        if f.e == 1 {
            return FieldElement(f.p - a.0);
        }
        let d: Vec<u32> = digits(f, a.0).into_iter().map(|c| (f.p - c) % f.p).collect();
        FieldElement(undigits(f, &d))
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let f = &*self.inner;
        match &f.logs {
            Some(t) => FieldElement(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]),
            None => FieldElement(mul_poly(f, a.0, b.0)),
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, GfError> {
        if a.0 == 0 {
            return Err(GfError::DivisionByZero);
        }
        let f = &*self.inner;
        Ok(match &f.logs {
            Some(t) => {
                let n = f.q - 1;
                FieldElement(t.exp[((n - t.log[a.0 as usize]) % n) as usize])
            }
            // a^(q-2) = a^-1 in F_q^*
            None => FieldElement(pow_slow(f, a.0, f.q as u64 - 2)),
        })
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, exp: u64) -> FieldElement {
        if exp == 0 {
            return FieldElement::ONE;
        }
        if a.0 == 0 {
            return FieldElement::ZERO;
        }
        let f = &*self.inner;
        match &f.logs {
            Some(t) => {
                let n = (f.q - 1) as u64;
                let e = (t.log[a.0 as usize] as u64 * (exp % n)) % n;
                FieldElement(t.exp[e as usize])
            }
            None => FieldElement(pow_slow(f, a.0, exp)),
        }
    }

    /// Checked arithmetic entry point: validates arity and membership of every operand.
    pub fn apply(&self, op: ArithOp, operands: &[FieldElement]) -> Result<FieldElement, GfError> {
        let expected = match op {
            ArithOp::Neg | ArithOp::Inv => 1,
            _ => 2,
        };
        if operands.len() != expected {
            return Err(GfError::Arity {
                op,
                expected,
                got: operands.len(),
            });
        }
        let first = operands[0];
        if !self.contains(first) {
            return Err(GfError::FieldMismatch {
                index: first.0 as u64,
                q: self.q(),
            });
        }
        if op != ArithOp::Pow {
            if let Some(&bad) = operands.iter().find(|x| !self.contains(**x)) {
                return Err(GfError::FieldMismatch {
                    index: bad.0 as u64,
                    q: self.q(),
                });
            }
        }
        let b = operands.get(1).copied().unwrap_or_default();
        match op {
            ArithOp::Add => Ok(self.add(first, b)),
            ArithOp::Sub => Ok(self.sub(first, b)),
            ArithOp::Mul => Ok(self.mul(first, b)),
            ArithOp::Neg => Ok(self.neg(first)),
            ArithOp::Inv => self.inv(first),
            ArithOp::Div => self.div(first, b),
            ArithOp::Pow => Ok(self.pow(first, b.0 as u64)),
        }
    }

    /// `kappa(v) = q - 1` if `v == 0`, else `-1`.
    #[inline]
    pub fn kappa(&self, v: FieldElement) -> i64 {
        if v.is_zero() {
            self.q() as i64 - 1
        } else {
            -1
        }
    }

    /// The nonzero element of smallest index with multiplicative order `q - 1`.
    pub fn primitive_element(&self) -> FieldElement {
        self.inner.primitive
    }

    /// Multiplicative order of a nonzero element, by repeated multiplication.
    pub fn order(&self, a: FieldElement) -> Option<u64> {
        if a.is_zero() {
            return None;
        }
        let mut x = a;
        let mut k = 1u64;
        while x != FieldElement::ONE {
            x = self.mul(x, a);
            k += 1;
        }
        Some(k)
    }

    /// All elements (or all nonzero elements) in ascending index order.
    pub fn enumerate(&self, nonzero_only: bool) -> impl Iterator<Item = FieldElement> + Clone {
        let start = u32::from(nonzero_only);
        (start..self.q()).map(FieldElement)
    }

    pub fn is_square(&self, a: FieldElement) -> bool {
        if a.is_zero() {
            return true;
        }
        match &self.inner.logs {
            Some(t) if self.p() != 2 => t.log[a.0 as usize] % 2 == 0,
            _ => {
                self.p() == 2 || self.pow(a, (self.q() as u64 - 1) / 2) == FieldElement::ONE
            }
        }
    }
}
