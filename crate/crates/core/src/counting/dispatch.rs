use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::model::CountQuery;
use crate::oracle::{self, OracleOptions};
use crate::par::Exec;
use crate::BigCount;

use super::{count_product_nonzero, count_product_zero, count_special_diag, count_special_mk, is_diagonal_shape, CountError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Special closed form when the shape allows, otherwise the general path.
    Auto,
    General,
    Special,
    Oracle,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Method::Auto),
            "general" => Ok(Method::General),
            "special" => Ok(Method::Special),
            "oracle" => Ok(Method::Oracle),
            other => Err(format!("unknown method {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodUsed {
    GeneralIe,
    GeneralFactor,
    SpecialMk,
    SpecialDiag,
    Oracle,
}

impl MethodUsed {
    pub fn label(self) -> &'static str {
        match self {
            MethodUsed::GeneralIe => "general-IE",
            MethodUsed::GeneralFactor => "general-factor",
            MethodUsed::SpecialMk => "special-mk",
            MethodUsed::SpecialDiag => "special-diag",
            MethodUsed::Oracle => "oracle",
        }
    }
}

impl fmt::Display for MethodUsed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CountOptions {
    pub exec: Exec,
    /// Lift the oracle size guard.
    pub oracle_force: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountOutcome {
    pub count: BigCount,
    pub method: MethodUsed,
    pub elapsed: Duration,
}

/// The special form that applies to this query, if any.
fn special_route(query: &CountQuery) -> Option<MethodUsed> {
    let sys = &query.system;
    if !query.target.is_zero() && sys.m() == sys.k() {
        Some(MethodUsed::SpecialMk)
    } else if is_diagonal_shape(sys) {
        Some(MethodUsed::SpecialDiag)
    } else {
        None
    }
}

/// Counts solutions of the query with the requested method.
pub fn count(query: &CountQuery, method: Method, opts: CountOptions) -> Result<CountOutcome, CountError> {
    let sys = &query.system;
    let a = query.target;
    let route = match method {
        Method::Oracle => MethodUsed::Oracle,
        Method::General if a.is_zero() => MethodUsed::GeneralIe,
        Method::General => MethodUsed::GeneralFactor,
        Method::Special => special_route(query).ok_or_else(|| {
            CountError::ShapeMismatch("no special closed form applies (needs m = k with a != 0, or A = (D1 D2))".into())
        })?,
        Method::Auto => special_route(query).unwrap_or(if a.is_zero() {
            MethodUsed::GeneralIe
        } else {
            MethodUsed::GeneralFactor
        }),
    };
    if route != MethodUsed::Oracle {
        sys.require_full_rank()?;
    }
    let start = Instant::now();
    let count: BigCount = match route {
        MethodUsed::Oracle => oracle::brute_count(
            query,
            OracleOptions {
                force: opts.oracle_force,
                exec: opts.exec,
            },
        )?,
        MethodUsed::GeneralIe => count_product_zero(sys, opts.exec)?,
        MethodUsed::GeneralFactor => count_product_nonzero(sys, a, opts.exec)?,
        MethodUsed::SpecialMk => count_special_mk(sys, a, opts.exec)?,
        MethodUsed::SpecialDiag => count_special_diag(sys, a)?,
    };
    Ok(CountOutcome {
        count,
        method: route,
        elapsed: start.elapsed(),
    })
}
