use thiserror::Error;

/// Errors produced by solvers, diagnosers and loaders in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Instance or report input does not match the expected schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// Matrix rows do not form a square matrix.
    #[error("matrix is not square: {rows} rows but row {row} has {cols} entries")]
    NotSquare {
        rows: usize,
        row: usize,
        cols: usize,
    },

    /// Symmetry check failed while constructing a symmetric operator.
    #[error("operator is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {deviation:.3e} exceeds tolerance")]
    AsymmetricOperator {
        row: usize,
        col: usize,
        deviation: f64,
    },

    /// The right-hand side z of an instance must be non-zero.
    #[error("z must be a non-zero vector")]
    ZeroZ,

    /// A vector entry is NaN or infinite.
    #[error("non-finite entry at position {index}")]
    NonFinite { index: usize },

    /// Vectors must have at least one entry.
    #[error("vector must have dimension >= 1")]
    EmptyVector,

    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// The Jacobi eigensolver did not reach its off-diagonal threshold.
    #[error(
        "eigensolver did not converge within {sweeps} sweeps (off-diagonal norm {off_norm:.3e})"
    )]
    EigenNonConvergence { sweeps: usize, off_norm: f64 },

    /// A resolvent solve was requested at or below the operator norm.
    #[error("lambda = {lambda} must exceed the operator norm {op_norm} by a positive margin")]
    LambdaTooSmall { lambda: f64, op_norm: f64 },

    /// The fixed-point iteration hit its iteration cap before converging.
    #[error("contraction iteration cap {cap} exceeded at lambda = {lambda}")]
    IterationCapExceeded { cap: usize, lambda: f64 },

    /// A secular-sum evaluation was requested too close to an eigenvalue.
    #[error("mu = {mu} is within tolerance of the eigenvalue {eigenvalue}")]
    MuAtEigenvalue { mu: f64, eigenvalue: f64 },

    /// A multiplier lies outside its admissible open interval.
    #[error("mu = {mu} must lie strictly inside ]{min}, {max}[")]
    MuOutOfRange { mu: f64, min: f64, max: f64 },

    /// A sphere radius must be positive.
    #[error("radius r = {r} must be positive")]
    NonPositiveRadius { r: f64 },

    /// A radius fell outside the interval where the requested curve exists.
    #[error("r = {r} is not inside ]0, theta[ with theta = {theta}")]
    OutOfRange { r: f64, theta: f64 },

    /// Grid sampling or audits need a minimum sample count.
    #[error("need at least {required} samples, got {got}")]
    TooFewSamples { got: usize, required: usize },

    /// A discretization or truncation dimension is too small.
    #[error("dimension {got} is too small, need at least {required}")]
    DimensionTooSmall { got: usize, required: usize },

    /// The source term of a discretized problem vanishes identically.
    #[error("phi must not vanish at every grid node")]
    ZeroPhi,
}

impl Error {
    /// True for errors that indicate malformed input (files, schemas,
    /// constructor arguments) rather than a domain condition reached during
    /// computation. The CLI maps the former to exit code 2, the latter to 1.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Schema(_)
                | Error::NotSquare { .. }
                | Error::AsymmetricOperator { .. }
                | Error::ZeroZ
                | Error::NonFinite { .. }
                | Error::EmptyVector
                | Error::DimensionMismatch { .. }
        )
    }
}
