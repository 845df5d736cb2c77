use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("elements belong to different algebras ({left} vs {right})")]
    AlgebraMismatch { left: String, right: String },

    #[error("grade {grade} is outside [-{k}, {k}]")]
    GradeOutOfRange { grade: i32, k: i32 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("grading depth {k} is not supported by the classifier (only 1 and 2)")]
    UnsupportedDepth { k: i32 },

    #[error("structural error: {0}")]
    Structural(String),

    #[error("invalid scale element: ad action fails on grade {component}")]
    InvalidScale { component: i32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown basis name `{0}`")]
    UnknownBasis(String),

    #[error("no matrix realization registered for {0}")]
    NoRealization(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("the singular-holonomy reduction does not apply: {0}")]
    HypothesisNotSatisfied(String),

    #[error("flow left the chart at t = {escape_time}")]
    Integration { escape_time: f64 },

    #[error("oracle refused: {0}")]
    OracleRefused(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
