use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("a max-affine model needs at least one piece")]
    NoPieces,

    #[error("a polytope needs at least one generator")]
    NoGenerators,

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("direction must be nonzero")]
    ZeroDirection,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("oracle evaluates to +inf at the base point")]
    InfiniteBasePoint,

    #[error("point is not interior to the conjugate domain, so the coercivity constant is 0")]
    NotInterior,

    #[error("certificate is not in the relative interior of the conjugate domain")]
    CertificateNotRelativeInterior,

    #[error(
        "line-constancy routes disagree (recession says {by_recession}, sampling says {by_sampling}); \
         oracle is noisy or not convex"
    )]
    RouteDisagreement {
        by_recession: bool,
        by_sampling: bool,
    },

    #[error("projection did not converge within {0} iterations")]
    IterationCap(usize),

    #[error("linear program hit the pivot limit ({0})")]
    PivotLimit(usize),

    #[error("linear program failed: {0}")]
    LpFailure(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
