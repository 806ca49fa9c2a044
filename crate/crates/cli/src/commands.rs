use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};
use mlcount_core::codes::{codeword_weight, min_distance, weight_hierarchy, CodeSpec};
use mlcount_core::counting::{count, CountOptions, Method};
use mlcount_core::model::parse_problem;
use mlcount_core::par::Exec;
use mlcount_core::{BigCount, FieldElement};
use serde_json::json;

use crate::bench::run_bench;
use crate::error::CliError;
use crate::selftest::{run_selftest, SelftestConfig, DEFAULT_SEED};

#[derive(Debug, Parser)]
#[command(name = "mlcount", version, about = "Exact solution counts for products of separated-variables multilinear polynomials")]
pub struct Cli {
    /// Worker threads for the parallel reductions.
    #[arg(long, global = true, env = "MLCOUNT_THREADS", default_value_t = 1)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count solutions of the problem in a file.
    Count(CountArgs),
    /// Parameters and weights of a multilinear code.
    Weights(WeightsArgs),
    /// Time the formula path against brute force.
    Bench(BenchArgs),
    /// Run the fixture and randomized suites.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long, default_value = "auto")]
    pub method: Method,
    #[arg(long)]
    pub json: bool,
    /// Lift the oracle size guard.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("what").required(true).multiple(true).args(["hierarchy", "min_distance", "word"])))]
pub struct WeightsArgs {
    #[arg(long)]
    pub code: PathBuf,
    #[arg(long)]
    pub hierarchy: bool,
    #[arg(long)]
    pub min_distance: bool,
    /// Comma-separated coefficients a_1,..,a_m (field element indices).
    #[arg(long)]
    pub word: Option<String>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub repeat: usize,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub skip_oracle: bool,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 20)]
    pub max_bits: u32,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Random instances per randomized suite.
    #[arg(long, default_value_t = 200)]
    pub cases: usize,
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn emit<W: Write>(out: &mut W, text: impl std::fmt::Display) -> Result<(), CliError> {
    writeln!(out, "{text}").map_err(|e| CliError::Io {
        path: "stdout".into(),
        message: e.to_string(),
    })
}

fn problem_id(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

pub fn run<W: Write>(cli: Cli, out: &mut W) -> Result<(), CliError> {
    if cli.threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let exec = Exec::with_threads(cli.threads);
    match cli.command {
        Command::Count(args) => cmd_count(args, exec, out),
        Command::Weights(args) => cmd_weights(args, out),
        Command::Bench(args) => cmd_bench(args, exec, out),
        Command::Selftest(args) => cmd_selftest(args, exec, out),
    }
}

fn cmd_count<W: Write>(args: CountArgs, exec: Exec, out: &mut W) -> Result<(), CliError> {
    // the oracle accepts any matrix; the formula routes re-check rank themselves
    let query = parse_problem(&read(&args.problem)?, args.method != Method::Oracle)?;
    let res = count(&query, args.method, CountOptions { exec, oracle_force: args.force })?;
    if args.json {
        let report = json!({
            "count": res.count.to_string(),
            "method": res.method.label(),
            "q": query.system.q(),
            "n": query.system.n(),
            "a": query.target.index(),
            "timing": { "elapsed_ns": res.elapsed.as_nanos() as u64 },
        });
        emit(out, report)
    } else {
        emit(out, &res.count)
    }
}

fn parse_word(text: &str, code: &CodeSpec) -> Result<Vec<FieldElement>, CliError> {
    text.split(',')
        .map(|s| {
            let idx: u64 = s.trim().parse().map_err(|_| CliError::Usage(format!("bad coefficient {s:?}")))?;
            code.field()
                .element(idx)
                .map_err(|_| CliError::Usage(format!("coefficient {idx} is not an element of F_{}", code.field().q())))
        })
        .collect()
}

fn cmd_weights<W: Write>(args: WeightsArgs, out: &mut W) -> Result<(), CliError> {
    let code = CodeSpec::parse(&read(&args.code)?)?;
    emit(out, format!("length: {}", code.length::<BigCount>()))?;
    emit(out, format!("dimension: {}", code.dimension()))?;
    if args.min_distance {
        emit(out, format!("min_distance: {}", min_distance::<BigCount>(&code)))?;
    }
    if let Some(word) = &args.word {
        let coeffs = parse_word(word, &code)?;
        emit(out, format!("weight: {}", codeword_weight::<BigCount>(&code, &coeffs)?))?;
    }
    if args.hierarchy {
        let d = weight_hierarchy::<BigCount>(&code)?;
        let text: Vec<String> = d.iter().map(ToString::to_string).collect();
        emit(out, format!("d: {}", text.join(" ")))?;
    }
    Ok(())
}

fn cmd_bench<W: Write>(args: BenchArgs, exec: Exec, out: &mut W) -> Result<(), CliError> {
    let query = parse_problem(&read(&args.problem)?, true)?;
    let id = problem_id(&args.problem);
    let report = run_bench(&id, &query, args.repeat, args.skip_oracle, CountOptions { exec, oracle_force: false })?;
    for t in &report.timings {
        let speedup = report.speedup(t).map(|s| format!(" speedup={s:.1}")).unwrap_or_default();
        emit(out, format!("{id} {} count={} median_ns={}{speedup}", t.label, t.count, t.median_ns()))?;
    }
    if let Some(path) = &args.csv {
        let io = |e: std::io::Error| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        };
        let file = fs::File::create(path).map_err(io)?;
        report.write_csv(file)?;
    }
    Ok(())
}

fn cmd_selftest<W: Write>(args: SelftestArgs, exec: Exec, out: &mut W) -> Result<(), CliError> {
    let cfg = SelftestConfig {
        max_bits: args.max_bits,
        seed: args.seed,
        cases: args.cases,
        exec,
    };
    let report = run_selftest(&cfg);
    write!(out, "{}", report.render()).map_err(|e| CliError::Io {
        path: "stdout".into(),
        message: e.to_string(),
    })?;
    if report.ok() {
        Ok(())
    } else {
        let failed: Vec<&str> = report.suites.iter().filter(|s| !s.ok()).map(|s| s.name).collect();
        Err(CliError::SelftestFailed(failed.join(", ")))
    }
}
