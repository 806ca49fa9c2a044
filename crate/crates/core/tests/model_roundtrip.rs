use mlcount_core::model::{parse_problem, serialize_problem, validate_system, ModelError};
use mlcount_core::sample::{random_matrix, random_partition, random_system, SampleSpec};
use mlcount_core::{make_field, CountQuery, FieldElement, FieldSpec, SystemSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spec() -> SampleSpec {
    SampleSpec {
        fields: vec![
            FieldSpec::prime(2).unwrap(),
            FieldSpec::prime(7).unwrap(),
            make_field(3, 2, None).unwrap(),
            make_field(2, 3, None).unwrap(),
        ],
        max_n: 12,
        max_m: 5,
        max_k: 4,
        max_bits: None,
    }
}

proptest! {
    #[test]
    fn problems_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_system(&mut rng, &spec());
        let a = FieldElement::from_index(rng.gen_range(0..sys.q()));
        let query = CountQuery::new(sys, a).unwrap();
        let text = serialize_problem(&query);
        let back = parse_problem(text.as_bytes(), true).unwrap();
        prop_assert_eq!(&back, &query);
        prop_assert_eq!(serialize_problem(&back), text);
    }

    #[test]
    fn relaxed_systems_round_trip_and_report_rank(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = FieldSpec::prime(3).unwrap();
        let n = rng.gen_range(1..=8);
        let m = rng.gen_range(1..=n.min(4));
        let k = rng.gen_range(1..=5);
        let sys = SystemSpec::relaxed(field.clone(), random_partition(&mut rng, n, m), random_matrix(&mut rng, &field, k, m)).unwrap();
        let query = CountQuery::new(sys.clone(), FieldElement::ZERO).unwrap();
        let text = serialize_problem(&query);
        prop_assert_eq!(parse_problem(text.as_bytes(), false).unwrap(), query);
        let strict = parse_problem(text.as_bytes(), true);
        let report = validate_system(&sys, true);
        prop_assert_eq!(strict.is_ok(), !report.has_errors());
        if sys.is_full_rank() {
            prop_assert!(strict.is_ok());
        } else {
            let is_rank_or_dim = matches!(strict, Err(ModelError::Rank { .. }) | Err(ModelError::Dimension { .. }));
            prop_assert!(is_rank_or_dim);
        }
    }
}

#[test]
fn schema_violations_are_rejected() {
    let bad = [
        r#"{"field":{"p":4},"n":1,"partition":[[1]],"A":[[1]],"a":0}"#,
        r#"{"field":{"p":3},"n":2,"partition":[[1]],"A":[[1]],"a":0}"#,
        r#"{"field":{"p":3},"n":1,"partition":[[1]],"A":[[3]],"a":0}"#,
        r#"{"field":{"p":3},"n":1,"partition":[[1]],"A":[[1]],"a":0,"extra":1}"#,
        r#"{"field":{"p":3},"n":1,"partition":[[1]],"A":[],"a":0}"#,
        r#"{"field":{"p":3},"n":1,"partition":[[1]],"A":[[1]],"a":5}"#,
    ];
    for text in bad {
        assert!(parse_problem(text.as_bytes(), true).is_err(), "{text}");
    }
}
