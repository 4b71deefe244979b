use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not hyperbolic: {0}")]
    NotHyperbolic(String),

    #[error("state left the Poincaré disk (|z| = {0})")]
    OutsideDisk(f64),

    #[error("domain reduction did not converge after {0} side pairings")]
    ReductionDiverged(usize),

    #[error("cocycle kind does not match base dynamics: {0}")]
    KindMismatch(String),

    #[error("holonomy did not converge within depth {depth}; last residuals {trace:?}")]
    HolonomyDiverged { depth: usize, trace: Vec<f64> },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("quadrature under-resolved: {0}")]
    Underresolved(String),

    #[error("underresolved or discontinuous map: residual {0:.3e}")]
    DegreeNotInteger(f64),

    #[error("pole of the Pestov coefficient at n + k = 3")]
    PestovPole,

    #[error("missing q(E) entry for case(s): {0}")]
    MissingCase(String),

    #[error("internal numerical error: {0}")]
    Internal(String),
}

impl Error {
    /// Errors caused by the numerics rather than by the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ReductionDiverged(_)
                | Error::HolonomyDiverged { .. }
                | Error::InsufficientData(_)
                | Error::Underresolved(_)
                | Error::DegreeNotInteger(_)
                | Error::Internal(_)
        )
    }
}
