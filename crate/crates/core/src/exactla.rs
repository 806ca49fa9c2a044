//! Dense linear algebra over `F_q`: echelon forms, inversion, and the
//! pivot/complement split `B^-1 (b - C y)` used by the system counts.

use thiserror::Error;

use crate::gf::{FieldElement, FieldSpec};
use crate::model::Partition;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("matrix is singular")]
    Singular,
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("selected rows have rank {rank} < {rows}")]
    RankDeficient { rank: usize, rows: usize },
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
}

/// Row-major dense matrix of field elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixFq {
    rows: usize,
    cols: usize,
    entries: Vec<FieldElement>,
}

impl MatrixFq {
    pub fn new(rows: usize, cols: usize, entries: Vec<FieldElement>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows * cols");
        MatrixFq {
            rows,
            cols,
            entries,
        }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![FieldElement::ZERO; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, FieldElement::ONE);
        }
        m
    }

    /// Builds a matrix from equal-length rows. `cols` is used when `rows` is empty.
    pub fn from_rows(rows: &[Vec<FieldElement>], cols: usize) -> Self {
        let cols = rows.first().map_or(cols, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn from_indices(rows: &[&[u32]]) -> Self {
        let v: Vec<Vec<FieldElement>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| FieldElement::from_index(x)).collect())
            .collect();
        Self::from_rows(&v, 0)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<FieldElement>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero_row(&self, r: usize) -> bool {
        self.row(r).iter().all(|x| x.is_zero())
    }

    /// The submatrix on the given rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> MatrixFq {
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                entries.push(self.get(r, c));
            }
        }
        MatrixFq::new(rows.len(), cols.len(), entries)
    }

    pub fn select_rows(&self, rows: &[usize]) -> MatrixFq {
        let cols: Vec<usize> = (0..self.cols).collect();
        self.select(rows, &cols)
    }

    pub fn mul(&self, field: &FieldSpec, rhs: &MatrixFq) -> MatrixFq {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = MatrixFq::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = FieldElement::ZERO;
                for t in 0..self.cols {
                    acc = field.add(acc, field.mul(self.get(i, t), rhs.get(t, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn mul_vec(&self, field: &FieldSpec, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(FieldElement::ZERO, |acc, (&a, &x)| field.add(acc, field.mul(a, x)))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub rank: usize,
    pub matrix: MatrixFq,
    /// Pivot column of each nonzero row, 0-based, increasing.
    pub pivot_cols: Vec<usize>,
}

/// Gauss-Jordan elimination to the unique reduced row echelon form.
pub fn rref_rank(field: &FieldSpec, m: &MatrixFq) -> Rref {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(pr) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        if pr != r {
            for j in 0..a.cols {
                let t = a.get(r, j);
                a.set(r, j, a.get(pr, j));
                a.set(pr, j, t);
            }
        }
        let inv = field.inv(a.get(r, c)).expect("pivot is nonzero");
        for j in 0..a.cols {
            a.set(r, j, field.mul(inv, a.get(r, j)));
        }
        for i in 0..a.rows {
            let factor = a.get(i, c);
            if i == r || factor.is_zero() {
                continue;
            }
            for j in 0..a.cols {
                let v = field.sub(a.get(i, j), field.mul(factor, a.get(r, j)));
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Rref {
        rank: pivots.len(),
        matrix: a,
        pivot_cols: pivots,
    }
}

pub fn rank(field: &FieldSpec, m: &MatrixFq) -> usize {
    rref_rank(field, m).rank
}

pub fn invert(field: &FieldSpec, m: &MatrixFq) -> Result<MatrixFq, LinAlgError> {
    if !m.is_square() {
        return Err(LinAlgError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    // reduce [M | I]
    let mut aug = MatrixFq::zero(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, m.get(i, j));
        }
        aug.set(i, n + i, FieldElement::ONE);
    }
    let red = rref_rank(field, &aug);
    // [M | I] always has rank n; M is invertible iff its pivots are exactly 0..n
    if n > 0 && red.pivot_cols[n - 1] != n - 1 {
        return Err(LinAlgError::Singular);
    }
    let cols: Vec<usize> = (n..2 * n).collect();
    let rows: Vec<usize> = (0..n).collect();
    Ok(red.matrix.select(&rows, &cols))
}

/// The split of `A_[rows]` into an invertible block `B` (columns `col_set`)
/// and the complement `C`, with `B^-1` and `sigma = B^-1 C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubmatrixChoice {
    /// Selected rows of `A`, 0-based, increasing.
    pub row_set: Vec<usize>,
    /// Pivot columns `nu_1 < .. < nu_l`, 0-based.
    pub col_set: Vec<usize>,
    /// Remaining columns `nu'_1 < .. < nu'_{m-l}`, 0-based.
    pub complement_cols: Vec<usize>,
    pub b_inv: MatrixFq,
    /// `l x (m - l)`.
    pub sigma: MatrixFq,
}

impl SubmatrixChoice {
    pub fn l(&self) -> usize {
        self.row_set.len()
    }

    /// `B^-1 b`: the pivot block products when every free block product is zero.
    pub fn rhs(&self, field: &FieldSpec, b: &[FieldElement]) -> Vec<FieldElement> {
        self.b_inv.mul_vec(field, b)
    }

    /// Variables of the complement blocks (`I_nu'`), 0-based, increasing.
    pub fn free_support(&self, partition: &Partition) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .complement_cols
            .iter()
            .flat_map(|&j| partition.block(j).iter().copied())
            .collect();
        v.sort_unstable();
        v
    }
}

/// Canonical choice: the pivot columns of the RREF of `A_[row_set]`, which is
/// the lexicographically smallest invertible column subset.
pub fn choose_submatrix(
    field: &FieldSpec,
    a: &MatrixFq,
    row_set: &[usize],
) -> Result<SubmatrixChoice, LinAlgError> {
    check_rows(a, row_set)?;
    let sub = a.select_rows(row_set);
    let red = rref_rank(field, &sub);
    if red.rank < row_set.len() {
        return Err(LinAlgError::RankDeficient {
            rank: red.rank,
            rows: row_set.len(),
        });
    }
    submatrix_with_columns(field, a, row_set, &red.pivot_cols)
}

/// The split for an explicit column choice; fails with `Singular` when `B` is not invertible.
pub fn submatrix_with_columns(
    field: &FieldSpec,
    a: &MatrixFq,
    row_set: &[usize],
    col_set: &[usize],
) -> Result<SubmatrixChoice, LinAlgError> {
    check_rows(a, row_set)?;
    if let Some(&c) = col_set.iter().find(|&&c| c >= a.cols) {
        return Err(LinAlgError::IndexOutOfRange {
            index: c,
            limit: a.cols,
        });
    }
    if col_set.len() != row_set.len() {
        return Err(LinAlgError::NotSquare {
            rows: row_set.len(),
            cols: col_set.len(),
        });
    }
    let mut col_set = col_set.to_vec();
    col_set.sort_unstable();
    let complement: Vec<usize> = (0..a.cols).filter(|c| !col_set.contains(c)).collect();
    let b = a.select(row_set, &col_set);
    let b_inv = invert(field, &b)?;
    let c = a.select(row_set, &complement);
    let sigma = b_inv.mul(field, &c);
    Ok(SubmatrixChoice {
        row_set: row_set.to_vec(),
        col_set,
        complement_cols: complement,
        b_inv,
        sigma,
    })
}

/// Every column subset that makes `B` invertible, in lexicographic order.
pub fn valid_column_sets(field: &FieldSpec, a: &MatrixFq, row_set: &[usize]) -> Vec<Vec<usize>> {
    let l = row_set.len();
    let mut out = Vec::new();
    for cols in combinations(a.cols, l) {
        if invert(field, &a.select(row_set, &cols)).is_ok() {
            out.push(cols);
        }
    }
    out
}

fn check_rows(a: &MatrixFq, row_set: &[usize]) -> Result<(), LinAlgError> {
    match row_set.iter().find(|&&r| r >= a.rows) {
        Some(&r) => Err(LinAlgError::IndexOutOfRange {
            index: r,
            limit: a.rows,
        }),
        None => Ok(()),
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}
