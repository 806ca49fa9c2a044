//! Worked-example fixtures plus randomized cross-path suites.

use std::fmt::Write as _;

use mlcount_core::counting::{
    count, count_special_diag, count_special_mk, count_system_with_choice, count_two_factor, CountError,
    CountOptions, Method,
};
use mlcount_core::exactla::{submatrix_with_columns, valid_column_sets};
use mlcount_core::model::serialize_problem;
use mlcount_core::oracle::{brute_count, value_distribution, OracleOptions};
use mlcount_core::par::Exec;
use mlcount_core::sample::{
    random_diagonal_system, random_square_system, random_system, random_two_factor_system, SampleSpec,
};
use mlcount_core::{make_field, BigCount, FieldElement, FieldSpec, SystemSpec};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::fixtures::{
    field_of_order, first_closed_form, first_example, query, second_closed_form, second_example,
};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy)]
pub struct SelftestConfig {
    /// Oracle-backed checks only run when `q^n <= 2^max_bits`.
    pub max_bits: u32,
    pub seed: u64,
    /// Random instances per randomized suite.
    pub cases: usize,
    pub exec: Exec,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig {
            max_bits: 20,
            seed: DEFAULT_SEED,
            cases: 200,
            exec: Exec::sequential(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    /// Problem file JSON reproducing the instance.
    pub instance: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteTally {
    pub name: &'static str,
    pub passed: usize,
    pub total: usize,
    pub failures: Vec<Failure>,
}

impl SuiteTally {
    fn new(name: &'static str) -> Self {
        SuiteTally {
            name,
            passed: 0,
            total: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, sys: &SystemSpec, a: FieldElement, outcome: Result<(), String>) {
        self.total += 1;
        match outcome {
            Ok(()) => self.passed += 1,
            Err(detail) => self.failures.push(Failure {
                instance: serialize_problem(&query(sys, a)),
                detail,
            }),
        }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelftestReport {
    pub suites: Vec<SuiteTally>,
}

impl SelftestReport {
    pub fn ok(&self) -> bool {
        self.suites.iter().all(SuiteTally::ok)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            let status = if s.ok() { "ok" } else { "FAIL" };
            let _ = writeln!(out, "{:<22} {:>5}/{:<5} {status}", s.name, s.passed, s.total);
            for f in &s.failures {
                let _ = writeln!(out, "  failure: {}\n  instance: {}", f.detail, f.instance);
            }
        }
        out
    }
}

fn oracle_fits(sys: &SystemSpec, max_bits: u32) -> bool {
    (sys.q() as f64).log2() * sys.n() as f64 <= max_bits as f64 + 1e-9
}

fn counted(sys: &SystemSpec, a: FieldElement, method: Method, exec: Exec) -> Result<BigCount, String> {
    count(&query(sys, a), method, CountOptions { exec, oracle_force: false })
        .map(|o| o.count)
        .map_err(|e| format!("{method:?}: {e}"))
}

fn oracle(sys: &SystemSpec, a: FieldElement, exec: Exec) -> Result<BigCount, String> {
    brute_count(&query(sys, a), OracleOptions { force: false, exec }).map_err(|e| format!("oracle: {e}"))
}

fn same(label: &str, expected: &BigCount, got: Result<BigCount, String>) -> Result<(), String> {
    let got = got?;
    if &got == expected {
        Ok(())
    } else {
        Err(format!("{label}: expected {expected}, got {got}"))
    }
}

fn fixture_suite(
    name: &'static str,
    orders: &[u32],
    build: fn(&FieldSpec) -> SystemSpec,
    closed: fn(&FieldSpec, FieldElement) -> BigCount,
    cfg: &SelftestConfig,
) -> SuiteTally {
    let mut tally = SuiteTally::new(name);
    for &q in orders {
        let field = field_of_order(q).expect("prime power");
        let sys = build(&field);
        // one brute-force pass yields every target's count
        let truth = if oracle_fits(&sys, cfg.max_bits) {
            Some(value_distribution::<BigCount>(&sys, OracleOptions { force: false, exec: cfg.exec }))
        } else {
            None
        };
        for a in field.enumerate(false) {
            let expected = closed(&field, a);
            let outcome = same("general", &expected, counted(&sys, a, Method::General, cfg.exec))
                .and_then(|_| same("auto", &expected, counted(&sys, a, Method::Auto, cfg.exec)))
                .and_then(|_| match &truth {
                    Some(dist) => {
                        let got = dist.as_ref().map(|d| d[a.index() as usize].clone()).map_err(|e| format!("oracle: {e}"));
                        same("oracle", &expected, got)
                    }
                    None => Ok(()),
                });
            tally.check(&sys, a, outcome);
        }
    }
    tally
}

/// The randomized suites draw from `q in {2,3,4,5}`, `n <= 10`, `m <= 4`, `k <= min(m, 3)`.
pub fn random_spec(max_bits: Option<u32>) -> SampleSpec {
    SampleSpec {
        fields: vec![
            FieldSpec::prime(2).unwrap(),
            FieldSpec::prime(3).unwrap(),
            make_field(2, 2, None).unwrap(),
            FieldSpec::prime(5).unwrap(),
        ],
        max_n: 10,
        max_m: 4,
        max_k: 3,
        max_bits,
    }
}

pub fn conservation_suite(cfg: &SelftestConfig) -> SuiteTally {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let spec = random_spec(None);
    let mut tally = SuiteTally::new("conservation");
    for _ in 0..cfg.cases {
        let sys = random_system(&mut rng, &spec);
        let outcome = sys
            .field()
            .enumerate(false)
            .map(|a| counted(&sys, a, Method::General, cfg.exec))
            .sum::<Result<BigCount, String>>()
            .and_then(|total| {
                let space = BigInt::from(sys.q()).pow(sys.n() as u32);
                if total == space {
                    Ok(())
                } else {
                    Err(format!("sum over targets {total} != q^n = {space}"))
                }
            });
        tally.check(&sys, FieldElement::ZERO, outcome);
    }
    tally
}

pub fn oracle_suite(cfg: &SelftestConfig) -> SuiteTally {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x0a);
    let spec = random_spec(Some(cfg.max_bits.min(26)));
    let mut tally = SuiteTally::new("oracle-equivalence");
    for _ in 0..cfg.cases {
        let sys = random_system(&mut rng, &spec);
        let dist = value_distribution::<BigCount>(&sys, OracleOptions { force: false, exec: cfg.exec });
        for a in sys.field().enumerate(false) {
            let outcome = match &dist {
                Err(e) => Err(format!("oracle: {e}")),
                Ok(d) => {
                    let truth = &d[a.index() as usize];
                    same("general", truth, counted(&sys, a, Method::General, cfg.exec))
                        .and_then(|_| same("auto", truth, counted(&sys, a, Method::Auto, cfg.exec)))
                }
            };
            tally.check(&sys, a, outcome);
        }
    }
    tally
}

pub fn invariance_suite(cfg: &SelftestConfig) -> SuiteTally {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x0b);
    let spec = random_spec(None);
    let mut tally = SuiteTally::new("submatrix-invariance");
    let wanted = (cfg.cases / 4).max(1);
    let mut seen = 0;
    while seen < wanted {
        let sys = random_system(&mut rng, &spec);
        let rows: Vec<usize> = (0..sys.k()).collect();
        let choices = valid_column_sets(sys.field(), sys.matrix(), &rows);
        if choices.len() < 2 {
            continue;
        }
        seen += 1;
        let q = sys.q();
        let mut outcome = Ok(());
        // up to 16 right-hand sides, spread over F_q^k
        for i in 0..16u32.min(q.pow(rows.len() as u32)) {
            let b: Vec<FieldElement> = rows
                .iter()
                .map(|&r| FieldElement::from_index((i / q.pow(r as u32) + seen as u32) % q))
                .collect();
            let counts: Result<Vec<BigCount>, CountError> = choices
                .iter()
                .map(|cols| {
                    let choice = submatrix_with_columns(sys.field(), sys.matrix(), &rows, cols)?;
                    count_system_with_choice(&sys, &choice, &b)
                })
                .collect();
            outcome = match counts {
                Err(e) => Err(e.to_string()),
                Ok(c) if c.windows(2).all(|w| w[0] == w[1]) => Ok(()),
                Ok(c) => Err(format!("rhs {b:?}: counts differ across {choices:?}: {c:?}")),
            };
            if outcome.is_err() {
                break;
            }
        }
        tally.check(&sys, FieldElement::ZERO, outcome);
    }
    tally
}

pub fn special_suite(cfg: &SelftestConfig) -> SuiteTally {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x0c);
    let spec = random_spec(Some(cfg.max_bits.min(26)));
    let mut tally = SuiteTally::new("special-forms");
    let per_shape = (cfg.cases / 4).max(1);
    for _ in 0..per_shape {
        let sys = random_square_system(&mut rng, &spec);
        for a in sys.field().enumerate(true) {
            let outcome = counted(&sys, a, Method::General, cfg.exec).and_then(|general| {
                let mk = count_special_mk(&sys, a, cfg.exec).map_err(|e| e.to_string());
                same("special-mk", &general, mk)?;
                same("oracle", &general, oracle(&sys, a, cfg.exec))
            });
            tally.check(&sys, a, outcome);
        }
    }
    for _ in 0..per_shape {
        let sys = random_diagonal_system(&mut rng, &spec);
        for a in sys.field().enumerate(false) {
            let outcome = counted(&sys, a, Method::General, cfg.exec).and_then(|general| {
                let diag = count_special_diag(&sys, a).map_err(|e| e.to_string());
                same("special-diag", &general, diag)?;
                same("oracle", &general, oracle(&sys, a, cfg.exec))
            });
            tally.check(&sys, a, outcome);
        }
    }
    tally
}

pub fn two_factor_suite(cfg: &SelftestConfig) -> SuiteTally {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x0d);
    let spec = random_spec(None);
    let mut tally = SuiteTally::new("two-factor");
    for _ in 0..(cfg.cases / 4).max(1) {
        let sys = random_two_factor_system(&mut rng, &spec);
        for a in sys.field().enumerate(false) {
            let outcome = counted(&sys, a, Method::General, cfg.exec).and_then(|general| {
                same("two-factor", &general, count_two_factor(&sys, a).map_err(|e| e.to_string()))
            });
            tally.check(&sys, a, outcome);
        }
    }
    tally
}

pub fn first_fixture_suite(cfg: &SelftestConfig) -> SuiteTally {
    fixture_suite("first-example", &[2, 3, 5, 7], first_example, first_closed_form, cfg)
}

pub fn second_fixture_suite(cfg: &SelftestConfig) -> SuiteTally {
    fixture_suite("second-example", &[2, 3], second_example, second_closed_form, cfg)
}

pub fn run_selftest(cfg: &SelftestConfig) -> SelftestReport {
    SelftestReport {
        suites: vec![
            first_fixture_suite(cfg),
            second_fixture_suite(cfg),
            conservation_suite(cfg),
            oracle_suite(cfg),
            invariance_suite(cfg),
            special_suite(cfg),
            two_factor_suite(cfg),
        ],
    }
}
