//! Closed forms for special shapes of the coefficient matrix, and the
//! two-factor formula. Each is an independent route to a count the general
//! path also produces.

use crate::exactla::{self, invert};
use crate::gf::FieldElement;
use crate::model::SystemSpec;
use crate::par::{Exec, Odometer};
use crate::scalar::CountScalar;

use super::{
    block_product_count_kappa, defect, support_product, tuple_count, BlockDistribution, CountError, Layout,
    MAX_TUPLES,
};

/// `N(f, a)` for `m = k` (square invertible `A`) and `a != 0`:
/// `sum_{(a_1..a_{m-1}) in (F_q^*)^(m-1)} prod_i (q^(|J_i|-1) + kappa(w_i) (q^(|J_i|-1) - (q-1)^(|J_i|-1)))`
/// with `w = A^-1 (a_1, .., a_{m-1}, a / (a_1 .. a_{m-1}))`.
pub fn count_special_mk<Z: CountScalar>(sys: &SystemSpec, a: FieldElement, exec: Exec) -> Result<Z, CountError> {
    if sys.m() != sys.k() {
        return Err(CountError::ShapeMismatch(format!("m = {} != k = {}", sys.m(), sys.k())));
    }
    if a.is_zero() {
        return Err(CountError::ZeroTarget);
    }
    let lay = Layout::of(sys);
    lay.check_scalar::<Z>()?;
    let field = lay.field;
    let a_inv = invert(field, lay.matrix)
        .map_err(|_| CountError::RankDeficient { rank: sys.rank(), rows: sys.k() })?;
    let m = lay.m();
    let radix = lay.q() - 1;
    let tuples = (radix as u64)
        .checked_pow(m as u32 - 1)
        .filter(|&t| t <= MAX_TUPLES)
        .ok_or_else(|| CountError::TooLarge(format!("{radix}^{} factorizations", m - 1)))?;

    Ok(exec.sum_range(tuples, |range| {
        let mut od = Odometer::starting_at(m - 1, radix, range.start);
        let mut b = vec![FieldElement::ZERO; m];
        let mut acc = Z::zero();
        for _ in range {
            let mut prod = FieldElement::ONE;
            for (j, &d) in od.digits().iter().enumerate() {
                b[j] = FieldElement::from_index(d + 1);
                prod = field.mul(prod, b[j]);
            }
            b[m - 1] = field.div(a, prod).expect("nonzero product");
            let w = a_inv.mul_vec(field, &b);
            let mut term = Z::one();
            for (i, &wi) in w.iter().enumerate() {
                term = term * block_product_count_kappa::<Z>(lay.sizes[i], wi, field);
            }
            acc = acc + term;
            od.advance();
        }
        acc
    }))
}

/// `m = 2k` and `A = (D_1 D_2)` with `D_1`, `D_2` invertible diagonal.
pub fn is_diagonal_shape(sys: &SystemSpec) -> bool {
    let (k, m) = (sys.k(), sys.m());
    if m != 2 * k {
        return false;
    }
    let a = sys.matrix();
    (0..k).all(|i| (0..m).all(|j| a.get(i, j).is_zero() != (j == i || j == k + i)))
}

/// Explicit count for the `A = (D_1 D_2)` shape.
///
/// Row `i` only involves blocks `J_i` and `J_{k+i}`. With
/// `X_j = q^(|J_j|-1) - (q-1)^(|J_j|-1)` and `D_i = |J_i| + |J_{k+i}|`:
///
/// * `a != 0`: `(q-1)^(k-1) prod_i (q^(D_i-1) - q X_i X_{k+i})`
/// * `a = 0`: `sum_{S != {}} (-1)^(|S|+1) q^(n - sum_S D_i) prod_{i in S} (q^(D_i-1) + (q-1) q X_i X_{k+i})`
///
/// The last inclusion-exclusion layer is the full row set.
pub fn count_special_diag<Z: CountScalar>(sys: &SystemSpec, a: FieldElement) -> Result<Z, CountError> {
    if !is_diagonal_shape(sys) {
        return Err(CountError::ShapeMismatch("A is not of the form (D1 D2) with invertible diagonal blocks".into()));
    }
    let lay = Layout::of(sys);
    lay.check_scalar::<Z>()?;
    let q = lay.q();
    let q64 = q as u64;
    let k = sys.k();
    let sizes = lay.sizes;
    let pair_size = |i: usize| sizes[i] + sizes[k + i];
    let cross = |i: usize| Z::from_u(q64) * defect::<Z>(q, sizes[i]) * defect::<Z>(q, sizes[k + i]);

    if !a.is_zero() {
        let mut acc = Z::pow_u(q64 - 1, k as u32 - 1);
        for i in 0..k {
            acc = acc * (Z::pow_u(q64, pair_size(i) as u32 - 1) - cross(i));
        }
        return Ok(acc);
    }

    if k > 16 {
        return Err(CountError::TooLarge(format!("k = {k} factors (limit 16)")));
    }
    let kappa0 = Z::from_u(q64 - 1);
    let joint: Vec<Z> = (0..k)
        .map(|i| Z::pow_u(q64, pair_size(i) as u32 - 1) + kappa0.clone() * cross(i))
        .collect();
    let mut total = Z::zero();
    for size in 1..=k {
        let mut layer = Z::zero();
        for subset in exactla::combinations(k, size) {
            let covered: usize = subset.iter().map(|&i| pair_size(i)).sum();
            let mut term = Z::pow_u(q64, (lay.n - covered) as u32);
            for &i in &subset {
                term = term * joint[i].clone();
            }
            layer = layer + term;
        }
        total = if size % 2 == 0 { total - layer } else { total + layer };
    }
    Ok(total)
}

/// The two-factor (`k = 2`) formulas.
///
/// `a = 0`: `2 q^(n-1) + (q-1)(P_1 + P_2) - N(f_1, f_2, 0, 0)`, where `P_i` is
/// the single-row support product.
///
/// `a != 0`: `sum_{u in F_q^*} sum_v weight(v) prod_{t=1,2} (q^(d_t-1) + kappa(a'_{t,1} u + a'_{t,2} a/u - sum_j sigma_{t,j} v_j) X_t)`,
/// with the `a'` coefficients taken from row `t` of `B^-1`.
pub fn count_two_factor<Z: CountScalar>(sys: &SystemSpec, a: FieldElement) -> Result<Z, CountError> {
    if sys.k() != 2 {
        return Err(CountError::ShapeMismatch(format!("k = {} != 2", sys.k())));
    }
    sys.require_full_rank()?;
    let lay = Layout::of(sys);
    lay.check_scalar::<Z>()?;
    let field = lay.field;
    let q = lay.q();
    let choice = exactla::choose_submatrix(field, lay.matrix, &[0, 1])?;
    let free = &choice.complement_cols;
    let dists: Vec<BlockDistribution<Z>> = lay.distributions();
    let tuples = tuple_count(q, free.len())?;

    // sum over free block values v of weight(v) * prod_t (kappa form at rhs - sigma v)
    let joint = |rhs: [FieldElement; 2]| -> Z {
        let mut od = Odometer::starting_at(free.len(), q, 0);
        let mut acc = Z::zero();
        for _ in 0..tuples {
            let v = od.digits();
            let mut weight = Z::one();
            for (j, &x) in v.iter().enumerate() {
                weight = weight * dists[free[j]].count(x == 0).clone();
            }
            let mut term = weight;
            for (t, &col) in choice.col_set.iter().enumerate() {
                let mut w = rhs[t];
                for (j, &x) in v.iter().enumerate() {
                    w = field.sub(w, field.mul(choice.sigma.get(t, j), FieldElement::from_index(x)));
                }
                term = term * block_product_count_kappa::<Z>(lay.sizes[col], w, field);
            }
            acc = acc + term;
            od.advance();
        }
        acc
    };

    if a.is_zero() {
        let base = Z::pow_u(q as u64, lay.n as u32 - 1);
        let p1 = support_product::<Z>(lay, lay.matrix.row(0));
        let p2 = support_product::<Z>(lay, lay.matrix.row(1));
        let both = joint([FieldElement::ZERO; 2]);
        return Ok(Z::from_u(2) * base + Z::from_u(q as u64 - 1) * (p1 + p2) - both);
    }

    let bi = &choice.b_inv;
    let mut total = Z::zero();
    for u in field.enumerate(true) {
        let a_over_u = field.div(a, u).expect("u is nonzero");
        let rhs = [0, 1].map(|t| field.add(field.mul(bi.get(t, 0), u), field.mul(bi.get(t, 1), a_over_u)));
        total = total + joint(rhs);
    }
    Ok(total)
}
