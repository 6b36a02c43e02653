use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty dataset")]
    EmptyDataset,

    #[error("class column `{0}` not found in header")]
    MissingClassColumn(String),

    #[error("degenerate attribute `{name}`: {distinct} distinct value(s), need at least 2")]
    DegenerateAttribute { name: String, distinct: usize },

    #[error("row {row}: column `{column}` has unknown level `{value}`")]
    UnknownLevel {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}: column `{column}` is blank")]
    MissingValue { row: usize, column: String },

    #[error("row {row}: expected {expected} fields, found {found}")]
    RowArity {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("invalid schema: {0}")]
    InvalidSchema(String),

    #[error("invalid itemset: {0}")]
    InvalidItemset(String),

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("no positive transactions: the target class never occurs")]
    NoPositives,

    #[error("relative risk undefined: pattern matches all {0} transactions")]
    UndefinedRelativeRisk(u64),

    #[error("nested counts violated: sub-pattern count {small} < super-pattern count {large}")]
    NestingViolated { small: u64, large: u64 },

    #[error("power bound undefined: {0}")]
    UndefinedPowerBound(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("infeasible synthetic target: {0}")]
    InfeasibleTarget(String),

    #[error("empty classifier")]
    EmptyClassifier,

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] io::Error),
}
