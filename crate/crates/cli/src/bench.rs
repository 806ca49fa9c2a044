//! Timing harness: formula path against the oracle on one problem.

use std::io::Write;
use std::time::Instant;

use mlcount_core::counting::{count, CountOptions, Method};
use mlcount_core::{BigCount, CountQuery};
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct MethodTiming {
    pub label: String,
    pub count: BigCount,
    pub samples_ns: Vec<u128>,
}

impl MethodTiming {
    /// Lower median of the samples.
    pub fn median_ns(&self) -> u128 {
        let mut s = self.samples_ns.clone();
        s.sort_unstable();
        s[(s.len() - 1) / 2]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub problem: String,
    pub timings: Vec<MethodTiming>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    problem: &'a str,
    method: &'a str,
    count: String,
    ns: u128,
    median_ns: u128,
    speedup: String,
}

impl BenchReport {
    /// Fails with `Mismatch` unless every method produced the same count.
    pub fn check_counts(&self) -> Result<(), CliError> {
        let Some(first) = self.timings.first() else {
            return Ok(());
        };
        match self.timings.iter().find(|t| t.count != first.count) {
            None => Ok(()),
            Some(bad) => Err(CliError::Mismatch {
                problem: self.problem.clone(),
                detail: format!("{} = {} but {} = {}", first.label, first.count, bad.label, bad.count),
            }),
        }
    }

    fn oracle(&self) -> Option<&MethodTiming> {
        self.timings.iter().find(|t| t.label == "oracle")
    }

    /// Oracle median over this method's median; `None` without an oracle run.
    pub fn speedup(&self, t: &MethodTiming) -> Option<f64> {
        self.oracle().map(|o| o.median_ns() as f64 / t.median_ns().max(1) as f64)
    }

    /// Speedup of the fastest non-oracle method.
    pub fn best_speedup(&self) -> Option<f64> {
        self.timings
            .iter()
            .filter(|t| t.label != "oracle")
            .filter_map(|t| self.speedup(t))
            .fold(None, |acc, s| Some(acc.map_or(s, |a: f64| a.max(s))))
    }

    /// One row per sample; `median_ns` and `speedup` repeat per method.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        self.check_counts()?;
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| CliError::Io { path: "csv".into(), message: e.to_string() };
        for t in &self.timings {
            let speedup = self.speedup(t).map(|s| format!("{s:.2}")).unwrap_or_default();
            for &ns in &t.samples_ns {
                w.serialize(CsvRow {
                    problem: &self.problem,
                    method: &t.label,
                    count: t.count.to_string(),
                    ns,
                    median_ns: t.median_ns(),
                    speedup: speedup.clone(),
                })
                .map_err(io)?;
            }
        }
        w.flush().map_err(|e| CliError::Io { path: "csv".into(), message: e.to_string() })
    }
}

fn time_method(query: &CountQuery, method: Method, repeat: usize, opts: CountOptions) -> Result<MethodTiming, CliError> {
    let mut samples = Vec::with_capacity(repeat);
    let mut result = None;
    for _ in 0..repeat {
        let start = Instant::now();
        let out = count(query, method, opts)?;
        samples.push(start.elapsed().as_nanos());
        result = Some(out);
    }
    let out = result.expect("repeat >= 1");
    Ok(MethodTiming {
        label: out.method.label().to_string(),
        count: out.count,
        samples_ns: samples,
    })
}

/// Times the formula path (dispatcher choice, plus the general path when the
/// dispatcher picks a special form) and, unless skipped, the oracle.
pub fn run_bench(
    problem: &str,
    query: &CountQuery,
    repeat: usize,
    skip_oracle: bool,
    opts: CountOptions,
) -> Result<BenchReport, CliError> {
    if repeat == 0 {
        return Err(CliError::Usage("--repeat must be at least 1".into()));
    }
    let mut timings = vec![time_method(query, Method::Auto, repeat, opts)?];
    let general = time_method(query, Method::General, repeat, opts)?;
    if general.label != timings[0].label {
        timings.push(general);
    }
    if !skip_oracle {
        timings.push(time_method(query, Method::Oracle, repeat, opts)?);
    }
    let report = BenchReport {
        problem: problem.to_string(),
        timings,
    };
    report.check_counts()?;
    Ok(report)
}
