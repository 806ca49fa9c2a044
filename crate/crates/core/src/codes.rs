//! The multilinear code with separated variables `C(q, n, J)`: the evaluation
//! code of all `f = sum_j a_j prod_{t in J_j} X_t` at every point of `F_q^n`.
//!
//! Length is `q^n` and dimension is `m`. Wei weights of subcodes come from the
//! system counts: a point lies outside the support of `D = <f_1, .., f_h>`
//! exactly when all `f_i` vanish there, so `w(D) = q^n - N(f_1, .., f_h, 0, .., 0)`.

use thiserror::Error;

use crate::counting::{self, CountError, Layout};
use crate::exactla::{self, combinations, MatrixFq};
use crate::gf::{FieldElement, FieldSpec};
use crate::model::{CodeFile, ModelError, Partition};
use crate::par::Exec;
use crate::scalar::CountScalar;

/// Largest number of subspaces examined per level of the hierarchy.
pub const MAX_SUBSPACES_PER_LEVEL: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error("expected {expected} coefficients, got {got}")]
    Length { expected: usize, got: usize },
    #[error("basis has rank {rank} < h = {h}")]
    RankDeficient { rank: usize, h: usize },
    #[error("level h = {h} has {count} subspaces, above the {limit} guard")]
    HierarchyTooLarge { h: usize, count: u128, limit: u128 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSpec {
    field: FieldSpec,
    partition: Partition,
}

/// Basis `f_1, .., f_h` of a subcode, as an `h x m` coefficient matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubcodeBasis {
    pub rows: MatrixFq,
}

impl SubcodeBasis {
    pub fn h(&self) -> usize {
        self.rows.rows()
    }
}

impl CodeSpec {
    pub fn new(field: FieldSpec, partition: Partition) -> Self {
        CodeSpec { field, partition }
    }

    pub fn from_file(file: CodeFile) -> Result<Self, ModelError> {
        let field = FieldSpec::from_descriptor(&file.field)?;
        let partition = Partition::new(file.n, file.partition)?;
        Ok(CodeSpec::new(field, partition))
    }

    pub fn parse(text: &[u8]) -> Result<Self, ModelError> {
        let file: CodeFile = serde_json::from_slice(text).map_err(|e| ModelError::Schema(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn length<Z: CountScalar>(&self) -> Z {
        Z::pow_u(self.field.q() as u64, self.partition.n() as u32)
    }

    pub fn dimension(&self) -> usize {
        self.partition.m()
    }

    /// Largest block size `s`.
    pub fn max_block(&self) -> usize {
        self.partition.max_block()
    }

    fn check_scalar<Z: CountScalar>(&self) -> Result<(), CodeError> {
        if Z::fits(self.field.q(), self.partition.n(), 2) {
            Ok(())
        } else {
            Err(CountError::ScalarOverflow {
                q: self.field.q(),
                n: self.partition.n(),
            }
            .into())
        }
    }
}

/// Weight of the codeword of `sum_j coeffs[j] prod_{t in J_j} X_t`:
/// `q^(n-1) (q-1) [1 - prod_{j: a_j != 0} (1 - ((q-1)/q)^(|J_j|-1))]`.
pub fn codeword_weight<Z: CountScalar>(code: &CodeSpec, coeffs: &[FieldElement]) -> Result<Z, CodeError> {
    let m = code.dimension();
    if coeffs.len() != m {
        return Err(CodeError::Length {
            expected: m,
            got: coeffs.len(),
        });
    }
    if let Some(bad) = coeffs.iter().find(|c| !code.field.contains(**c)) {
        return Err(CountError::Invalid(format!("coefficient {} not in F_{}", bad.index(), code.field.q())).into());
    }
    code.check_scalar::<Z>()?;
    let row = MatrixFq::new(1, m, coeffs.to_vec());
    let lay = Layout::with_matrix(&code.field, &code.partition, &row);
    let zeros: Z = counting::single_row(lay, 0, FieldElement::ZERO);
    Ok(code.length::<Z>() - zeros)
}

/// `q^(n-s) (q-1)^s` with `s` the largest block size.
pub fn min_distance<Z: CountScalar>(code: &CodeSpec) -> Z {
    let q = code.field.q() as u64;
    let s = code.max_block() as u32;
    Z::pow_u(q, code.partition.n() as u32 - s) * Z::pow_u(q - 1, s)
}

/// Wei weight (support size) of the subcode spanned by `basis`, via the
/// formula-path joint-zero count.
pub fn wei_weight<Z: CountScalar>(code: &CodeSpec, basis: &SubcodeBasis) -> Result<Z, CodeError> {
    let h = basis.h();
    if basis.rows.cols() != code.dimension() {
        return Err(CodeError::Length {
            expected: code.dimension(),
            got: basis.rows.cols(),
        });
    }
    let rank = exactla::rank(&code.field, &basis.rows);
    if rank < h {
        return Err(CodeError::RankDeficient { rank, h });
    }
    code.check_scalar::<Z>()?;
    let lay = Layout::with_matrix(&code.field, &code.partition, &basis.rows);
    let rows: Vec<usize> = (0..h).collect();
    let zeros: Z = counting::system_count(lay, &rows, &vec![FieldElement::ZERO; h], Exec::sequential())?;
    Ok(code.length::<Z>() - zeros)
}

/// Number of `h`-dimensional subspaces of `F_q^m`, saturating at `u128::MAX`.
pub fn gaussian_binomial(m: usize, h: usize, q: u32) -> u128 {
    if h > m {
        return 0;
    }
    // [m, h] = [m-1, h-1] + q^h [m-1, h]
    let mut row = vec![0u128; h + 1];
    row[0] = 1;
    for mm in 1..=m {
        for hh in (1..=h.min(mm)).rev() {
            let qh = (q as u128).checked_pow(hh as u32).unwrap_or(u128::MAX);
            row[hh] = row[hh - 1].saturating_add(qh.saturating_mul(row[hh]));
        }
    }
    row[h]
}

/// Every `h`-dimensional subspace of `F_q^m` exactly once, as its reduced row
/// echelon basis: pivot sets in lexicographic order, then free entries.
pub fn enumerate_subspaces(m: usize, h: usize, field: &FieldSpec) -> impl Iterator<Item = SubcodeBasis> {
    let q = field.q();
    let pivots = if h == 0 || h > m { Vec::new() } else { combinations(m, h) };
    pivots.into_iter().flat_map(move |piv| {
        // free positions: right of the row's pivot, outside every pivot column
        let free: Vec<(usize, usize)> = piv
            .iter()
            .enumerate()
            .flat_map(|(r, &p)| (p + 1..m).filter(|c| !piv.contains(c)).map(move |c| (r, c)))
            .collect();
        let total = (q as u64).pow(free.len() as u32);
        (0..total).map(move |mut code| {
            let mut rows = MatrixFq::zero(h, m);
            for (r, &p) in piv.iter().enumerate() {
                rows.set(r, p, FieldElement::ONE);
            }
            for &(r, c) in &free {
                rows.set(r, c, FieldElement::from_index((code % q as u64) as u32));
                code /= q as u64;
            }
            SubcodeBasis { rows }
        })
    })
}

/// `d_h = min { w(D) : dim D = h }` for `h = 1..m`.
pub fn weight_hierarchy<Z: CountScalar>(code: &CodeSpec) -> Result<Vec<Z>, CodeError> {
    let m = code.dimension();
    let q = code.field.q();
    for h in 1..=m {
        let count = gaussian_binomial(m, h, q);
        if count > MAX_SUBSPACES_PER_LEVEL {
            return Err(CodeError::HierarchyTooLarge {
                h,
                count,
                limit: MAX_SUBSPACES_PER_LEVEL,
            });
        }
    }
    (1..=m)
        .map(|h| {
            let mut best: Option<Z> = None;
            for basis in enumerate_subspaces(m, h, &code.field) {
                let w = wei_weight::<Z>(code, &basis)?;
                if best.as_ref().is_none_or(|b| w < *b) {
                    best = Some(w);
                }
            }
            Ok(best.expect("every level has at least one subspace"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;
    use crate::model::SystemSpec;
    use crate::oracle::{brute_count_system, value_distribution, OracleOptions};
    use std::collections::HashSet;

    fn code(p: u64, sizes: &[usize]) -> CodeSpec {
        CodeSpec::new(FieldSpec::prime(p).unwrap(), Partition::consecutive(sizes).unwrap())
    }

    fn el(i: u32) -> FieldElement {
        FieldElement::from_index(i)
    }

    /// Support size of a codeword by evaluating it at every point.
    fn brute_weight(code: &CodeSpec, coeffs: &[FieldElement]) -> i64 {
        let sys = SystemSpec::relaxed(
            code.field.clone(),
            code.partition.clone(),
            MatrixFq::new(1, coeffs.len(), coeffs.to_vec()),
        )
        .unwrap();
        let dist = value_distribution::<i64>(&sys, OracleOptions::default()).unwrap();
        dist.iter().skip(1).sum()
    }

    #[test]
    fn parameters() {
        let c = code(2, &[2, 2, 3]);
        assert_eq!(c.length::<i64>(), 128);
        assert_eq!(c.dimension(), 3);
        assert_eq!(c.max_block(), 3);
    }

    #[test]
    fn codeword_weights() {
        let c = code(3, &[2, 1, 3]);
        assert_eq!(codeword_weight::<i64>(&c, &[el(0); 3]).unwrap(), 0);
        // single monomial on block of size d: (q-1)^d q^(n-d)
        assert_eq!(codeword_weight::<i64>(&c, &[el(0), el(0), el(2)]).unwrap(), 8 * 27);
        let c2 = code(2, &[2, 2, 3]);
        let coeffs = [el(1), el(1), el(1)];
        assert_eq!(codeword_weight::<i64>(&c2, &coeffs).unwrap(), brute_weight(&c2, &coeffs));
        assert!(matches!(
            codeword_weight::<i64>(&c2, &[el(1)]),
            Err(CodeError::Length { expected: 3, got: 1 })
        ));
    }

    #[test]
    fn codeword_weight_exhaustive() {
        for (p, sizes) in [(2u64, vec![1, 2, 3]), (3, vec![2, 1, 2]), (5, vec![1, 2])] {
            let c = code(p, &sizes);
            let q = p as u32;
            for idx in 0..q.pow(sizes.len() as u32) {
                let mut x = idx;
                let coeffs: Vec<FieldElement> = sizes
                    .iter()
                    .map(|_| {
                        let v = x % q;
                        x /= q;
                        el(v)
                    })
                    .collect();
                assert_eq!(codeword_weight::<i64>(&c, &coeffs).unwrap(), brute_weight(&c, &coeffs));
            }
        }
    }

    #[test]
    fn min_distance_examples() {
        assert_eq!(min_distance::<i64>(&code(2, &[2, 2, 3])), 16);
        assert_eq!(min_distance::<i64>(&code(5, &[1, 1, 1])), 25 * 4);
        assert_eq!(min_distance::<i64>(&code(3, &[2, 1])), 12);
    }

    #[test]
    fn wei_weights() {
        let c = code(2, &[1, 1]);
        let whole = SubcodeBasis { rows: MatrixFq::identity(2) };
        assert_eq!(wei_weight::<i64>(&c, &whole).unwrap(), 3);

        let c = code(2, &[2, 2, 3]);
        let basis = SubcodeBasis { rows: MatrixFq::from_indices(&[&[1, 0, 1], &[0, 1, 1]]) };
        let sys = SystemSpec::new(c.field.clone(), c.partition.clone(), basis.rows.clone()).unwrap();
        let zeros = brute_count_system::<i64>(&sys, &[0, 1], &[el(0), el(0)], OracleOptions::default()).unwrap();
        assert_eq!(wei_weight::<i64>(&c, &basis).unwrap(), 128 - zeros);

        let single = SubcodeBasis { rows: MatrixFq::from_indices(&[&[1, 1, 0]]) };
        assert_eq!(
            wei_weight::<i64>(&c, &single).unwrap(),
            codeword_weight::<i64>(&c, &[el(1), el(1), el(0)]).unwrap()
        );
        let dependent = SubcodeBasis { rows: MatrixFq::from_indices(&[&[1, 1, 0], &[1, 1, 0]]) };
        assert!(matches!(wei_weight::<i64>(&c, &dependent), Err(CodeError::RankDeficient { .. })));
    }

    #[test]
    fn subspace_enumeration() {
        let f2 = FieldSpec::prime(2).unwrap();
        let f3 = FieldSpec::prime(3).unwrap();
        assert_eq!(enumerate_subspaces(2, 1, &f2).count(), 3);
        assert_eq!(enumerate_subspaces(2, 1, &f3).count(), 4);
        assert_eq!(enumerate_subspaces(3, 2, &f2).count(), 7);
        for (m, f) in [(3, f2.clone()), (4, f2.clone()), (3, f3.clone()), (3, make_field(2, 2, None).unwrap())] {
            for h in 1..=m {
                let spaces: Vec<SubcodeBasis> = enumerate_subspaces(m, h, &f).collect();
                assert_eq!(spaces.len() as u128, gaussian_binomial(m, h, f.q()));
                let mut seen = HashSet::new();
                for s in &spaces {
                    let r = exactla::rref_rank(&f, &s.rows);
                    assert_eq!(r.rank, h);
                    assert_eq!(r.matrix, s.rows, "basis is already in RREF");
                    assert!(seen.insert(s.rows.entries().to_vec()));
                }
            }
        }
    }

    #[test]
    fn gaussian_binomials() {
        assert_eq!(gaussian_binomial(3, 2, 2), 7);
        assert_eq!(gaussian_binomial(4, 2, 2), 35);
        assert_eq!(gaussian_binomial(2, 1, 3), 4);
        assert_eq!(gaussian_binomial(5, 0, 7), 1);
        assert_eq!(gaussian_binomial(2, 3, 7), 0);
    }

    #[test]
    fn hierarchies() {
        assert_eq!(weight_hierarchy::<i64>(&code(2, &[1, 1])).unwrap(), vec![2, 3]);
        let c = code(2, &[2, 2, 3]);
        let d = weight_hierarchy::<i64>(&c).unwrap();
        assert_eq!(d[0], min_distance::<i64>(&c));
        assert!(d.windows(2).all(|w| w[0] < w[1]));
        // whole code: q^n minus the common zeros of all monomials
        assert_eq!(*d.last().unwrap(), 128 - 3 * 3 * 7);
    }

    #[test]
    fn hierarchy_guard() {
        let c = code(13, &[1; 8]);
        assert!(matches!(weight_hierarchy::<i64>(&c), Err(CodeError::HierarchyTooLarge { .. })));
    }
}
