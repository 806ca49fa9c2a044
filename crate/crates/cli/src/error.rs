use mlcount_core::codes::CodeError;
use mlcount_core::counting::CountError;
use mlcount_core::model::ModelError;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid argument: {0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("count mismatch on {problem}: {detail}")]
    Mismatch { problem: String, detail: String },
    #[error("selftest failed: {0}")]
    SelftestFailed(String),
}

impl CliError {
    /// Process exit status.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::SelftestFailed(_) => 1,
            CliError::Io { .. } | CliError::Usage(_) => 2,
            CliError::Model(e) => model_code(e),
            CliError::Count(e) => count_code(e),
            CliError::Code(e) => match e {
                CodeError::Model(m) => model_code(m),
                CodeError::Count(c) => count_code(c),
                CodeError::Length { .. } => 2,
                CodeError::RankDeficient { .. } => 3,
                CodeError::HierarchyTooLarge { .. } => 5,
            },
            CliError::Mismatch { .. } => 6,
        }
    }

    /// Short stable identifier for the error class.
    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            1 => "selftest",
            2 => "schema",
            3 => "rank",
            4 => "guard",
            5 => "hierarchy-too-large",
            6 => "count-mismatch",
            _ => "error",
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": self.kind(), "code": self.exit_code(), "message": self.to_string() }).to_string()
    }
}

fn model_code(e: &ModelError) -> i32 {
    match e {
        ModelError::Rank { .. } | ModelError::Dimension { .. } => 3,
        _ => 2,
    }
}

fn count_code(e: &CountError) -> i32 {
    match e {
        CountError::RankDeficient { .. } | CountError::Dimension { .. } | CountError::ShapeMismatch(_) => 3,
        CountError::ZeroTarget => 3,
        CountError::OracleTooLarge { .. } | CountError::TooLarge(_) | CountError::ScalarOverflow { .. } => 4,
        CountError::Invalid(_) => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::from(ModelError::Rank { rank: 1, k: 2 }).exit_code(), 3);
        assert_eq!(CliError::from(ModelError::Dimension { k: 3, m: 2 }).exit_code(), 3);
        assert_eq!(CliError::from(ModelError::Schema("x".into())).exit_code(), 2);
        let guard = CountError::OracleTooLarge { q: 3, n: 30, limit_bits: 26 };
        assert_eq!(CliError::from(guard).exit_code(), 4);
        let big = CodeError::HierarchyTooLarge { h: 2, count: 10, limit: 1 };
        assert_eq!(CliError::from(big).exit_code(), 5);
        let bad = CliError::Mismatch { problem: "p".into(), detail: "d".into() };
        assert_eq!(bad.exit_code(), 6);
        let v: serde_json::Value = serde_json::from_str(&bad.to_json()).unwrap();
        assert_eq!(v["code"], 6);
        assert_eq!(v["error"], "count-mismatch");
    }
}
