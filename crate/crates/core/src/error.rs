use thiserror::Error;

/// Errors raised by operators, solvers, problem builders and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("zero curvature along direction: |d'Ad| = {curvature:e} <= {threshold:e}")]
    ZeroCurvature { curvature: f64, threshold: f64 },

    #[error("curvature breakdown: |s'y| = {value:e} <= {threshold:e}")]
    CurvatureBreakdown { value: f64, threshold: f64 },

    #[error("denominator breakdown: |y'Hy| = {value:e} <= {threshold:e}")]
    DenominatorBreakdown { value: f64, threshold: f64 },

    #[error("SR1 breakdown: |(s - Hy)'y| = {value:e} <= {threshold:e}")]
    Sr1Breakdown { value: f64, threshold: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("operator is not symmetric: relative defect {defect:e}")]
    NotSymmetric { defect: f64 },

    #[error("operator is not linear: relative defect {defect:e}")]
    NotLinear { defect: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state became non-finite during propagation")]
    BlowUp,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("length mismatch between traces: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
