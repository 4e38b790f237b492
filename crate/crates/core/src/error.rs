use thiserror::Error;

/// Errors raised by the algebraic and numerical pipeline.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum TorsionError {
    #[error("unsupported family or parameter: {0}")]
    UnsupportedFamily(String),
    #[error("polynomial is not divisible; remainder {remainder}")]
    NotDivisible { remainder: String },
    #[error("polynomials are not coprime: {0}")]
    NotCoprime(String),
    #[error("root finder did not converge (worst residual {worst_residual:e})")]
    ConvergenceFailure { worst_residual: f64 },
    #[error("{unmatched} roots have no reciprocal partner within tolerance")]
    PairingFailure { unmatched: usize },
    #[error("no sign of the square-root branch satisfies the relators (best residual {best_residual:e})")]
    NoValidSign { best_residual: f64 },
    #[error("representation solver failed from every seed (best residual {best_residual:e})")]
    NewtonDivergence { best_residual: f64 },
    #[error("closed form not applicable at this point: {0}")]
    BranchDomain(String),
    #[error("cochain complex is not acyclic (margin {margin:e}, ranks {ranks:?})")]
    NotAcyclic { margin: f64, ranks: Vec<usize> },
    #[error("consecutive differentials do not compose to zero (scaled norm {norm:e})")]
    ChainConditionViolated { norm: f64 },
    #[error("derivative vanishes at the requested root")]
    DerivativeVanishes,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, TorsionError>;
