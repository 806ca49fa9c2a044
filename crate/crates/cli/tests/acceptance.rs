//! Acceptance checks, one line per criterion. Runs without the libtest harness
//! so the report is always printed; exits nonzero if any criterion fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mlcount_cli::bench::run_bench;
use mlcount_cli::fixtures::{
    field_of_order, first_even_nonzero, first_example, first_example_scaled, first_nonsquare, first_square,
    first_zero, query, second_example, second_nonzero, second_zero,
};
use mlcount_cli::selftest::{
    conservation_suite, invariance_suite, oracle_suite, special_suite, two_factor_suite, SelftestConfig, SuiteTally,
};
use mlcount_core::codes::{codeword_weight, min_distance, wei_weight, weight_hierarchy, CodeSpec, SubcodeBasis};
use mlcount_core::counting::{count_formula, CountOptions};
use mlcount_core::exactla::rank;
use mlcount_core::oracle::{brute_count_system, value_distribution, OracleOptions};
use mlcount_core::par::Exec;
use mlcount_core::sample::{random_matrix, random_partition};
use mlcount_core::{BigCount, FieldElement, FieldSpec, SystemSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x00ac_ce97;

struct Outcome {
    pass: bool,
    summary: String,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            pass: true,
            summary: String::new(),
            notes: Vec::new(),
        }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.pass = false;
            self.notes.push(format!("mismatch: {}", what()));
        }
    }

    fn within(&mut self, start: Instant, budget: Duration) {
        let took = start.elapsed();
        self.expect(took <= budget, || format!("took {took:?}, budget {budget:?}"));
        self.summary.push_str(&format!(" [{:.2}s]", took.as_secs_f64()));
    }
}

fn general(sys: &SystemSpec, a: FieldElement) -> BigCount {
    count_formula(sys, a, Exec::sequential()).expect("valid system")
}

fn distribution(sys: &SystemSpec) -> Vec<BigCount> {
    value_distribution(sys, OracleOptions::default()).expect("small enough")
}

fn first_fixtures() -> Outcome {
    let start = Instant::now();
    let mut out = Outcome::new();
    let mut checks = 0;
    for q in [2u32, 3, 5, 7] {
        let field = field_of_order(q).unwrap();
        let sys = first_example(&field);
        let brute = (q <= 3).then(|| distribution(&sys));
        let zero = general(&sys, FieldElement::ZERO);
        out.expect(zero == first_zero(q), || format!("q={q} a=0: {zero} vs {}", first_zero(q)));
        if let Some(d) = &brute {
            out.expect(d[0] == zero, || format!("q={q} a=0: oracle {}", d[0]));
        }
        checks += 1;
        for a in field.enumerate(true) {
            let got = general(&sys, a);
            if let Some(d) = &brute {
                out.expect(d[a.index() as usize] == got, || format!("q={q} a={a}: oracle disagrees"));
            }
            checks += 1;
            if q % 2 == 1 {
                let expected = if field.is_square(a) { first_square(q) } else { first_nonsquare(q) };
                out.expect(got == expected, || format!("q={q} a={a}: {got} vs {expected}"));
            } else {
                // every nonzero element is a square here; record what the square form gives
                let square = first_square(q);
                let even = first_even_nonzero(q);
                out.expect(got == even, || format!("q={q} a={a}: {got} vs even-q form {even}"));
                if got != square {
                    out.notes.push(format!(
                        "recorded: q={q}, a={a}: square-target form gives {square}, formula path and oracle give {got}; \
                         the even-q form (q-1)^2 q (q^3+q^2-3q+2) = {even} holds"
                    ));
                }
            }
        }
    }
    out.summary = format!("first example: {checks} targets over q in {{2,3,5,7}}, oracle at q in {{2,3}}");
    out.within(start, Duration::from_secs(5));
    out
}

fn second_fixtures() -> Outcome {
    let start = Instant::now();
    let mut out = Outcome::new();
    let mut checks = 0;
    for q in [2u32, 3] {
        let field = FieldSpec::prime(q as u64).unwrap();
        let sys = second_example(&field);
        let brute = distribution(&sys);
        for a in field.enumerate(false) {
            let got = general(&sys, a);
            let closed = if a.is_zero() { second_zero(q) } else { second_nonzero(&field, a) };
            out.expect(got == closed, || format!("q={q} a={a}: {got} vs closed form {closed}"));
            out.expect(brute[a.index() as usize] == got, || format!("q={q} a={a}: oracle {}", brute[a.index() as usize]));
            checks += 1;
        }
    }
    out.summary = format!("second example: {checks} targets over q in {{2,3}}, closed forms and oracle");
    out.within(start, Duration::from_secs(10));
    out
}

fn from_suite(tally: SuiteTally, min_instances: usize, what: &str) -> Outcome {
    let mut out = Outcome::new();
    out.summary = format!("{what}: {}/{} checks", tally.passed, tally.total);
    out.expect(tally.total >= min_instances, || format!("only {} checks, need {min_instances}", tally.total));
    for f in tally.failures.iter().take(5) {
        out.expect(false, || format!("{} on {}", f.detail, f.instance));
    }
    out
}

fn cfg() -> SelftestConfig {
    SelftestConfig {
        max_bits: 20,
        seed: SEED,
        cases: 200,
        exec: Exec::sequential(),
    }
}

fn coding_theory() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let orders = [2u32, 3, 4, 5, 7, 8, 9, 11, 13, 16];

    // min distance against the exhaustive minimum, q^m <= 2^12
    let mut codes = 0;
    for &q in &orders {
        let field = field_of_order(q).unwrap();
        let max_m = (12.0 / (q as f64).log2()).floor() as usize;
        for m in 1..=max_m {
            for _ in 0..4 {
                let n = rng.gen_range(m..=m + 4);
                let code = CodeSpec::new(field.clone(), random_partition(&mut rng, n, m));
                let exhaustive = (1..q.pow(m as u32))
                    .map(|mut x| {
                        let coeffs: Vec<FieldElement> = (0..m)
                            .map(|_| {
                                let v = x % q;
                                x /= q;
                                FieldElement::from_index(v)
                            })
                            .collect();
                        codeword_weight::<BigCount>(&code, &coeffs).unwrap()
                    })
                    .min()
                    .unwrap();
                let formula = min_distance::<BigCount>(&code);
                out.expect(formula == exhaustive, || format!("{code:?}: {formula} vs {exhaustive}"));
                codes += 1;
            }
        }
    }

    // hierarchies
    let mut hierarchies = 0;
    for (q, max_m) in [(2u32, 4usize), (3, 3), (4, 3), (5, 2), (7, 2)] {
        let field = field_of_order(q).unwrap();
        for m in 1..=max_m {
            for _ in 0..3 {
                let n = rng.gen_range(m..=m + 3);
                let code = CodeSpec::new(field.clone(), random_partition(&mut rng, n, m));
                let d = weight_hierarchy::<BigCount>(&code).unwrap();
                out.expect(d.windows(2).all(|w| w[0] < w[1]), || format!("{code:?}: {d:?} not increasing"));
                out.expect(d[0] == min_distance::<BigCount>(&code), || format!("{code:?}: d1 {}", d[0]));
                hierarchies += 1;
            }
        }
    }

    // Wei weights against brute force, q^n <= 2^16
    let mut subcodes = 0;
    while subcodes < 60 {
        let q = orders[rng.gen_range(0..4)];
        let field = field_of_order(q).unwrap();
        let n = rng.gen_range(1..=(16.0 / (q as f64).log2()) as usize);
        let m = rng.gen_range(1..=n.min(4));
        let h = rng.gen_range(1..=m);
        let rows = random_matrix(&mut rng, &field, h, m);
        if rank(&field, &rows) < h {
            continue;
        }
        let partition = random_partition(&mut rng, n, m);
        let code = CodeSpec::new(field.clone(), partition.clone());
        let sys = SystemSpec::new(field, partition, rows.clone()).unwrap();
        let all: Vec<usize> = (0..h).collect();
        let zeros: BigCount =
            brute_count_system(&sys, &all, &vec![FieldElement::ZERO; h], OracleOptions::default()).unwrap();
        let w = wei_weight::<BigCount>(&code, &SubcodeBasis { rows }).unwrap();
        out.expect(w == code.length::<BigCount>() - &zeros, || format!("{sys:?}: wei weight {w}"));
        subcodes += 1;
    }
    out.summary = format!(
        "codes: {codes} min-distance checks (q^m <= 2^12), {hierarchies} hierarchies, {subcodes} Wei weights vs oracle"
    );
    out
}

fn performance() -> Outcome {
    let mut out = Outcome::new();
    let field = FieldSpec::prime(3).unwrap();
    let sys = first_example_scaled(&field, 4);
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let mut ratios = Vec::new();
    for a in [0u32, 1, 2] {
        let id = format!("first_q3_444_a{a}");
        let q = query(&sys, FieldElement::from_index(a));
        let report = match run_bench(&id, &q, 5, false, CountOptions::default()) {
            Ok(r) => r,
            Err(e) => {
                out.expect(false, || format!("{id}: {e}"));
                continue;
            }
        };
        let path = dir.join(format!("{id}.csv"));
        report.write_csv(std::fs::File::create(&path).unwrap()).unwrap();
        let ratio = report.best_speedup().unwrap_or(0.0);
        out.expect(ratio >= 100.0, || format!("{id}: speedup {ratio:.1} < 100"));
        out.notes.push(format!("{id}: speedup {ratio:.0}x, csv {}", path.display()));
        ratios.push(ratio);
    }
    let worst = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    out.summary = format!("q=3, blocks (4,4,4): formula vs oracle, worst speedup {worst:.0}x (threshold 100x)");
    out
}

fn main() -> ExitCode {
    let criteria: Vec<(u32, fn() -> Outcome)> = vec![
        (1, first_fixtures),
        (2, second_fixtures),
        (3, || from_suite(conservation_suite(&cfg()), 200, "conservation over random systems")),
        (4, || from_suite(oracle_suite(&cfg()), 200, "formula = oracle for every target, q^n <= 2^20")),
        (5, || from_suite(invariance_suite(&cfg()), 50, "count identical across all valid pivot choices")),
        (6, || from_suite(special_suite(&cfg()), 100, "square and diagonal closed forms vs general and oracle")),
        (7, coding_theory),
        (8, performance),
        (9, || from_suite(two_factor_suite(&cfg()), 50, "two-factor formulas vs general path")),
    ];
    let mut failed = 0;
    for (id, check) in criteria {
        let start = Instant::now();
        let out = check();
        let status = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {id}: {status} {} ({:.2}s)", out.summary, start.elapsed().as_secs_f64());
        for n in &out.notes {
            println!("    {n}");
        }
        if !out.pass {
            failed += 1;
        }
    }
    println!("acceptance: {}/9 criteria pass", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
