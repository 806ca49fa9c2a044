//! Seeded random instances for the randomized suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::exactla::{self, MatrixFq};
use crate::gf::{FieldElement, FieldSpec};
use crate::model::{Partition, SystemSpec};

/// A random partition of `0..n` into exactly `m` nonempty blocks.
pub fn random_partition<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> Partition {
    assert!(1 <= m && m <= n);
    let mut vars: Vec<usize> = (0..n).collect();
    vars.shuffle(rng);
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(m - 1).collect();
    cuts.sort_unstable();
    let mut blocks = Vec::with_capacity(m);
    let mut start = 0;
    for c in cuts.into_iter().chain(std::iter::once(n)) {
        blocks.push(vars[start..c].to_vec());
        start = c;
    }
    Partition::from_zero_based(n, blocks).expect("cuts produce a partition")
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, field: &FieldSpec, rows: usize, cols: usize) -> MatrixFq {
    let entries = (0..rows * cols)
        .map(|_| FieldElement::from_index(rng.gen_range(0..field.q())))
        .collect();
    MatrixFq::new(rows, cols, entries)
}

/// A random `k x m` matrix of rank `k`, by rejection.
pub fn random_full_rank<R: Rng + ?Sized>(rng: &mut R, field: &FieldSpec, k: usize, m: usize) -> MatrixFq {
    assert!(k <= m);
    loop {
        let a = random_matrix(rng, field, k, m);
        if exactla::rank(field, &a) == k {
            return a;
        }
    }
}

fn random_nonzero<R: Rng + ?Sized>(rng: &mut R, field: &FieldSpec) -> FieldElement {
    FieldElement::from_index(rng.gen_range(1..field.q()))
}

/// Bounds for [`random_system`].
#[derive(Debug, Clone)]
pub struct SampleSpec {
    pub fields: Vec<FieldSpec>,
    pub max_n: usize,
    pub max_m: usize,
    pub max_k: usize,
    /// Reject instances with `q^n` above `2^bits`.
    pub max_bits: Option<u32>,
}

fn fits(field: &FieldSpec, n: usize, max_bits: Option<u32>) -> bool {
    max_bits.is_none_or(|b| (field.q() as f64).log2() * n as f64 <= b as f64 + 1e-9)
}

/// A random valid formula-path system within the bounds.
pub fn random_system<R: Rng + ?Sized>(rng: &mut R, spec: &SampleSpec) -> SystemSpec {
    loop {
        let field = spec.fields.choose(rng).expect("at least one field").clone();
        let n = rng.gen_range(1..=spec.max_n);
        if !fits(&field, n, spec.max_bits) {
            continue;
        }
        let m = rng.gen_range(1..=spec.max_m.min(n));
        let k = rng.gen_range(1..=spec.max_k.min(m));
        let partition = random_partition(rng, n, m);
        let a = random_full_rank(rng, &field, k, m);
        return SystemSpec::new(field, partition, a).expect("full rank by construction");
    }
}

/// A random system with `m = k` and invertible `A`.
pub fn random_square_system<R: Rng + ?Sized>(rng: &mut R, spec: &SampleSpec) -> SystemSpec {
    loop {
        let field = spec.fields.choose(rng).expect("at least one field").clone();
        let m = rng.gen_range(1..=spec.max_m.min(spec.max_k));
        let n = rng.gen_range(m..=spec.max_n.max(m));
        if !fits(&field, n, spec.max_bits) {
            continue;
        }
        let partition = random_partition(rng, n, m);
        let a = random_full_rank(rng, &field, m, m);
        return SystemSpec::new(field, partition, a).expect("invertible by construction");
    }
}

/// A random system of the `A = (D_1 D_2)` shape: `m = 2k`, both diagonal blocks invertible.
pub fn random_diagonal_system<R: Rng + ?Sized>(rng: &mut R, spec: &SampleSpec) -> SystemSpec {
    loop {
        let field = spec.fields.choose(rng).expect("at least one field").clone();
        let k = rng.gen_range(1..=spec.max_k.min(spec.max_m / 2).max(1));
        let m = 2 * k;
        let n = rng.gen_range(m..=spec.max_n.max(m));
        if !fits(&field, n, spec.max_bits) {
            continue;
        }
        let partition = random_partition(rng, n, m);
        let mut a = MatrixFq::zero(k, m);
        for i in 0..k {
            a.set(i, i, random_nonzero(rng, &field));
            a.set(i, k + i, random_nonzero(rng, &field));
        }
        return SystemSpec::new(field, partition, a).expect("diagonal blocks are invertible");
    }
}

/// A random system with `k = 2`.
pub fn random_two_factor_system<R: Rng + ?Sized>(rng: &mut R, spec: &SampleSpec) -> SystemSpec {
    let mut spec = spec.clone();
    spec.max_k = 2;
    loop {
        let sys = random_system(rng, &spec);
        if sys.k() == 2 {
            return sys;
        }
    }
}
