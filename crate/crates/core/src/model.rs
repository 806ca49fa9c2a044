//! Problem instances: the variable partition, the coefficient matrix, the
//! target value, and the JSON problem/code file formats.
//!
//! Files use 1-based variable indices; everything in memory is 0-based.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactla::{self, MatrixFq};
use crate::gf::{FieldDescriptor, FieldElement, FieldSpec, GfError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("field error: {0}")]
    Field(#[from] GfError),
    #[error("partition error: {0}")]
    Partition(String),
    #[error("dimension error: k = {k} factors exceed m = {m} blocks")]
    Dimension { k: usize, m: usize },
    #[error("rank error: rank(A) = {rank} < k = {k}")]
    Rank { rank: usize, k: usize },
    #[error("entry error: {0}")]
    Entry(String),
}

/// A partition `{J_1, .., J_m}` of the variables `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
    sizes: Vec<usize>,
}

impl Partition {
    /// Builds a partition from 1-based blocks, as written in problem files.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self, ModelError> {
        let zero_based = blocks
            .into_iter()
            .map(|b| {
                b.into_iter()
                    .map(|x| {
                        x.checked_sub(1).ok_or_else(|| {
                            ModelError::Partition("variable indices start at 1".into())
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_zero_based(n, zero_based)
    }

    pub fn from_zero_based(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::Partition("n must be at least 1".into()));
        }
        if blocks.is_empty() {
            return Err(ModelError::Partition("no blocks".into()));
        }
        let mut seen = vec![false; n];
        let mut sorted = Vec::with_capacity(blocks.len());
        for (j, mut b) in blocks.into_iter().enumerate() {
            if b.is_empty() {
                return Err(ModelError::Partition(format!("block {} is empty", j + 1)));
            }
            for &x in &b {
                if x >= n {
                    return Err(ModelError::Partition(format!(
                        "variable {} outside 1..={n}",
                        x + 1
                    )));
                }
                if seen[x] {
                    return Err(ModelError::Partition(format!(
                        "variable {} appears twice",
                        x + 1
                    )));
                }
                seen[x] = true;
            }
            b.sort_unstable();
            sorted.push(b);
        }
        if let Some(gap) = seen.iter().position(|s| !s) {
            return Err(ModelError::Partition(format!(
                "variable {} is in no block",
                gap + 1
            )));
        }
        let sizes = sorted.iter().map(Vec::len).collect();
        Ok(Partition {
            n,
            blocks: sorted,
            sizes,
        })
    }

    /// Consecutive blocks of the given sizes: `{1..d_1}, {d_1+1..}, ..`.
    pub fn consecutive(sizes: &[usize]) -> Result<Self, ModelError> {
        let mut blocks = Vec::with_capacity(sizes.len());
        let mut next = 0;
        for &d in sizes {
            blocks.push((next..next + d).collect());
            next += d;
        }
        Self::from_zero_based(next, blocks)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, j: usize) -> &[usize] {
        &self.blocks[j]
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn max_block(&self) -> usize {
        self.sizes.iter().copied().max().unwrap_or(0)
    }

    /// Blocks with 1-based indices, for serialization.
    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|x| x + 1).collect())
            .collect()
    }
}

/// The product `f_1 .. f_k` with `f_i = sum_j A[i][j] prod_{t in J_j} X_t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemSpec {
    field: FieldSpec,
    partition: Partition,
    matrix: MatrixFq,
    rank: usize,
}

impl SystemSpec {
    /// Strict constructor for the formula path: requires `k <= m` and `rank(A) = k`.
    pub fn new(field: FieldSpec, partition: Partition, matrix: MatrixFq) -> Result<Self, ModelError> {
        let sys = Self::relaxed(field, partition, matrix)?;
        sys.require_full_rank()?;
        Ok(sys)
    }

    /// Accepts any coefficient matrix of the right shape (zero rows, rank
    /// deficiency, `k > m`). Only the oracle is valid on such systems.
    pub fn relaxed(field: FieldSpec, partition: Partition, matrix: MatrixFq) -> Result<Self, ModelError> {
        if matrix.rows() == 0 {
            return Err(ModelError::Schema("A must have at least one row".into()));
        }
        if matrix.cols() != partition.m() {
            return Err(ModelError::Schema(format!(
                "A has {} columns but the partition has {} blocks",
                matrix.cols(),
                partition.m()
            )));
        }
        if let Some(bad) = matrix.entries().iter().find(|x| !field.contains(**x)) {
            return Err(ModelError::Entry(format!(
                "matrix entry {} is not an element of F_{}",
                bad.index(),
                field.q()
            )));
        }
        let rank = exactla::rank(&field, &matrix);
        Ok(SystemSpec {
            field,
            partition,
            matrix,
            rank,
        })
    }

    /// Re-asserts the formula-path assumptions `k <= m` and `rank(A) = k`.
    pub fn require_full_rank(&self) -> Result<(), ModelError> {
        if self.k() > self.m() {
            return Err(ModelError::Dimension {
                k: self.k(),
                m: self.m(),
            });
        }
        if self.rank < self.k() {
            return Err(ModelError::Rank {
                rank: self.rank,
                k: self.k(),
            });
        }
        Ok(())
    }

    pub fn is_full_rank(&self) -> bool {
        self.k() <= self.m() && self.rank == self.k()
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn matrix(&self) -> &MatrixFq {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn k(&self) -> usize {
        self.matrix.rows()
    }

    pub fn m(&self) -> usize {
        self.partition.m()
    }

    pub fn n(&self) -> usize {
        self.partition.n()
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }
}

/// `f_1 .. f_k = a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountQuery {
    pub system: SystemSpec,
    pub target: FieldElement,
}

impl CountQuery {
    pub fn new(system: SystemSpec, target: FieldElement) -> Result<Self, ModelError> {
        if !system.field().contains(target) {
            return Err(ModelError::Entry(format!(
                "target {} is not an element of F_{}",
                target.index(),
                system.q()
            )));
        }
        Ok(CountQuery { system, target })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    Dimension,
    Rank,
    ZeroRow,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub kind: DiagnosticKind,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub rank: usize,
    pub diagnostics: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.diagnostics.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.severity == Severity::Error)
    }
}

/// Lists every violated formula-path assumption. Rank deficiency is an error
/// only when `require_rank` is set; otherwise it is reported as a warning.
pub fn validate_system(sys: &SystemSpec, require_rank: bool) -> ValidationReport {
    let mut diagnostics = Vec::new();
    let (k, m) = (sys.k(), sys.m());
    if k > m {
        diagnostics.push(Diagnostic {
            severity: Severity::Error,
            kind: DiagnosticKind::Dimension,
            message: format!("k = {k} exceeds m = {m}"),
        });
    }
    if sys.rank() < k {
        diagnostics.push(Diagnostic {
            severity: if require_rank { Severity::Error } else { Severity::Warning },
            kind: DiagnosticKind::Rank,
            message: format!("rank(A) = {} < k = {k}", sys.rank()),
        });
    }
    for r in 0..k {
        if sys.matrix().is_zero_row(r) {
            diagnostics.push(Diagnostic {
                severity: Severity::Warning,
                kind: DiagnosticKind::ZeroRow,
                message: format!("row {} of A is zero (f_{} = 0)", r + 1, r + 1),
            });
        }
    }
    ValidationReport {
        rank: sys.rank(),
        diagnostics,
    }
}

/// On-disk problem file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub field: FieldDescriptor,
    pub n: usize,
    pub partition: Vec<Vec<usize>>,
    #[serde(rename = "A")]
    pub matrix: Vec<Vec<u64>>,
    pub a: u64,
}

/// On-disk code file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeFile {
    pub field: FieldDescriptor,
    pub n: usize,
    pub partition: Vec<Vec<usize>>,
}

pub(crate) fn build_matrix(field: &FieldSpec, rows: &[Vec<u64>], m: usize) -> Result<MatrixFq, ModelError> {
    let mut out = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        if r.len() != m {
            return Err(ModelError::Schema(format!(
                "row {} of A has {} entries, expected {m}",
                i + 1,
                r.len()
            )));
        }
        let row = r
            .iter()
            .map(|&x| {
                field
                    .element(x)
                    .map_err(|_| ModelError::Entry(format!("entry {x} is not an element of F_{}", field.q())))
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push(row);
    }
    Ok(MatrixFq::from_rows(&out, m))
}

impl ProblemFile {
    pub fn into_query(self, require_rank: bool) -> Result<CountQuery, ModelError> {
        let field = FieldSpec::from_descriptor(&self.field)?;
        let partition = Partition::new(self.n, self.partition)?;
        if self.matrix.is_empty() {
            return Err(ModelError::Schema("A must have at least one row".into()));
        }
        let k = self.matrix.len();
        if require_rank && k > partition.m() {
            return Err(ModelError::Dimension { k, m: partition.m() });
        }
        let matrix = build_matrix(&field, &self.matrix, partition.m())?;
        let target = field
            .element(self.a)
            .map_err(|_| ModelError::Entry(format!("target {} is not an element of F_{}", self.a, field.q())))?;
        let system = if require_rank {
            SystemSpec::new(field, partition, matrix)?
        } else {
            SystemSpec::relaxed(field, partition, matrix)?
        };
        CountQuery::new(system, target)
    }

    pub fn from_query(query: &CountQuery) -> Self {
        let sys = &query.system;
        ProblemFile {
            field: sys.field().descriptor(),
            n: sys.n(),
            partition: sys.partition().to_one_based(),
            matrix: sys
                .matrix()
                .to_rows()
                .iter()
                .map(|r| r.iter().map(|x| x.index() as u64).collect())
                .collect(),
            a: query.target.index() as u64,
        }
    }
}

/// Parses and validates a problem file. With `require_rank`, the formula-path
/// assumptions are enforced as errors.
pub fn parse_problem(text: &[u8], require_rank: bool) -> Result<CountQuery, ModelError> {
    let raw: ProblemFile =
        serde_json::from_slice(text).map_err(|e| ModelError::Schema(e.to_string()))?;
    raw.into_query(require_rank)
}

/// Canonical JSON text of a query.
pub fn serialize_problem(query: &CountQuery) -> String {
    serde_json::to_string(&ProblemFile::from_query(query)).expect("problem files always serialize")
}
