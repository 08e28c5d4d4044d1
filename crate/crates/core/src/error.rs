use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected order {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not symmetric (relative asymmetry {0:e})")]
    NonSymmetric(f64),
    #[error("matrix is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("matrix is singular (|det| = {0:e})")]
    Singular(f64),
    #[error("matrix is not orthogonal (residual {0:e})")]
    NotOrthogonal(f64),
    #[error("eigenvalue iteration did not converge within {0} sweeps")]
    ConvergenceFailure(usize),
    #[error("matrix is not in the image of the rho embedding (block ({0}, {1}))")]
    NotInImage(usize, usize),
    #[error("matrix is not semisimple (eigenvalue {re} + {im}i has a geometric multiplicity deficit)")]
    NotSemisimple { re: f64, im: f64 },
    #[error("eigenvalue moduli are not constant (max/min - 1 = {0:e})")]
    NonConstantModulus(f64),
    #[error("tangent vectors are attached to different base points")]
    BasePointMismatch,
    #[error("isometry is not elliptic: {0}")]
    NotElliptic(String),
    #[error("point is not fixed by the isometry (relative residual {0:e})")]
    NotAFixedPoint(f64),
    #[error("block extraction failed: {0}")]
    BlockExtractionFailure(String),
    #[error("canonical conjugator failed reassembly (relative residual {0:e})")]
    ReassemblyFailure(f64),
}
