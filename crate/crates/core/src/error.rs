use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("generator index {index} out of range for {gens} generators")]
    GeneratorOutOfRange { index: usize, gens: usize },
    #[error("too many generators: {0} (at most 62)")]
    TooManyGenerators(usize),
    #[error("algebra mismatch: {0} vs {1} generators")]
    AlgebraMismatch(usize, usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not even")]
    NotEven,
    #[error("matrix is not skew-symmetric (entry {0},{1})")]
    NotSkew(usize, usize),
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
    #[error("series did not converge: {0}")]
    NotConverged(String),
    #[error("outside the principal branch: {0}")]
    Branch(String),
    #[error("{0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("operator is not self-adjoint (residual {0:.3e})")]
    NotSelfAdjoint(f64),
    #[error("growth condition violated: {0}")]
    Growth(String),
    #[error("unknown {kind} '{name}' (known: {known})")]
    UnknownName { kind: &'static str, name: String, known: String },
}

pub type Result<T> = std::result::Result<T, Error>;
