use mlcount_core::codes::{codeword_weight, min_distance, wei_weight, weight_hierarchy, CodeSpec, SubcodeBasis};
use mlcount_core::exactla::rank;
use mlcount_core::oracle::{brute_count_system, OracleOptions};
use mlcount_core::sample::{random_matrix, random_partition};
use mlcount_core::{make_field, FieldElement, FieldSpec, Partition, SystemSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_fields() -> Vec<FieldSpec> {
    vec![
        FieldSpec::prime(2).unwrap(),
        FieldSpec::prime(3).unwrap(),
        make_field(2, 2, None).unwrap(),
        FieldSpec::prime(5).unwrap(),
        FieldSpec::prime(7).unwrap(),
    ]
}

/// Minimum weight over all nonzero codewords, by enumeration of the message space.
fn exhaustive_min(code: &CodeSpec) -> i64 {
    let q = code.field().q();
    let m = code.dimension();
    (1..q.pow(m as u32))
        .map(|mut x| {
            let coeffs: Vec<FieldElement> = (0..m)
                .map(|_| {
                    let v = x % q;
                    x /= q;
                    FieldElement::from_index(v)
                })
                .collect();
            codeword_weight::<i64>(code, &coeffs).unwrap()
        })
        .min()
        .unwrap()
}

#[test]
fn min_distance_equals_exhaustive_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for field in small_fields() {
        let q = field.q();
        let max_m = (12.0 / (q as f64).log2()).floor() as usize;
        for _ in 0..20 {
            let m = rng.gen_range(1..=max_m.min(6));
            let n = rng.gen_range(m..=m + 5);
            let code = CodeSpec::new(field.clone(), random_partition(&mut rng, n, m));
            assert_eq!(min_distance::<i64>(&code), exhaustive_min(&code), "{code:?}");
        }
    }
}

#[test]
fn hierarchies_increase_and_start_at_min_distance() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for field in small_fields().into_iter().take(3) {
        for _ in 0..6 {
            let m = rng.gen_range(1..=3);
            let n = rng.gen_range(m..=m + 4);
            let code = CodeSpec::new(field.clone(), random_partition(&mut rng, n, m));
            let d = weight_hierarchy::<i64>(&code).unwrap();
            assert_eq!(d.len(), m);
            assert_eq!(d[0], min_distance::<i64>(&code));
            assert!(d.windows(2).all(|w| w[0] < w[1]), "{code:?}: {d:?}");
            // common zeros of all monomials: each block has some zero coordinate
            let q = field.q() as i64;
            let zeros: i64 = code
                .partition()
                .block_sizes()
                .iter()
                .map(|&s| q.pow(s as u32) - (q - 1).pow(s as u32))
                .product();
            assert_eq!(d[m - 1], code.length::<i64>() - zeros);
        }
    }
}

#[test]
fn wei_weight_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let mut checked = 0;
    while checked < 60 {
        let field = small_fields()[rng.gen_range(0..3)].clone();
        let bits = (field.q() as f64).log2();
        let n = rng.gen_range(1..=(16.0 / bits) as usize);
        let m = rng.gen_range(1..=n.min(4));
        let h = rng.gen_range(1..=m);
        let rows = random_matrix(&mut rng, &field, h, m);
        if rank(&field, &rows) < h {
            continue;
        }
        checked += 1;
        let partition = random_partition(&mut rng, n, m);
        let code = CodeSpec::new(field.clone(), partition.clone());
        let basis = SubcodeBasis { rows: rows.clone() };
        let sys = SystemSpec::new(field, partition, rows).unwrap();
        let all: Vec<usize> = (0..h).collect();
        let zeros: i64 =
            brute_count_system(&sys, &all, &vec![FieldElement::ZERO; h], OracleOptions::default()).unwrap();
        assert_eq!(wei_weight::<i64>(&code, &basis).unwrap(), code.length::<i64>() - zeros);
    }
}

#[test]
fn first_example_code() {
    let code = CodeSpec::new(FieldSpec::prime(2).unwrap(), Partition::consecutive(&[2, 2, 3]).unwrap());
    assert_eq!(min_distance::<i64>(&code), 16);
    let d = weight_hierarchy::<i64>(&code).unwrap();
    assert_eq!(d[0], 16);
    assert!(d[0] < d[1] && d[1] < d[2]);
}
