use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("undeclared variable `{name}` at offset {pos}")]
    UndeclaredVariable { name: String, pos: usize },
    #[error("variable `{0}` has an unbounded or empty domain")]
    UnboundedDomain(String),
    #[error("invalid domain declaration on line {line}: {msg}")]
    DomainDecl { line: usize, msg: String },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("gradient requested outside the interior of the support")]
    OutsideSupport,
    #[error("NaN input")]
    NanInput,
    #[error("empty truncation: probability mass in [{lo}, {hi}] is below 1e-300")]
    EmptyTruncation { lo: f64, hi: f64 },
    #[error("CDF intractable: box mass needs an independent product of univariates with closed-form CDFs")]
    CdfIntractable,
    #[error("seeding failed: no feasible point found (constraint possibly infeasible)")]
    SeedingFailed,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("method `{method}` is not applicable: {reason}")]
    NotApplicable { method: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
