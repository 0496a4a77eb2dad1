use alloc::boxed::Box;

use crate::band_optimizer::CandidateLevels;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(&'static str),
    #[error("invalid penalty: {0}")]
    InvalidPenalty(&'static str),
    #[error("invalid strategy: {0}")]
    InvalidStrategy(&'static str),
    #[error("roots {0} and {1} of the Cramér–Lundberg equation coincide")]
    MultipleRoot(f64, f64),
    #[error("root finder did not converge")]
    RootNotConverged,
    #[error("argument outside the domain: {0}")]
    DomainError(&'static str),
    #[error("no second band: the stopping criterion never turns positive on the search range")]
    NoSecondBand,
    #[error("band recursion stopped after {} bands without passing the generator test", .0.strategy.bands.len())]
    IterationCapExceeded(Box<CandidateLevels>),
    #[error("value function jumps by {gap:e} at knot {x}")]
    KnotMismatch { x: f64, gap: f64 },
    #[error("simulation needs a compound Poisson model (sigma2 = 0)")]
    UnsupportedModel,
}

impl Error {
    /// Variant name, used by the command line front end.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidModel(_) => "InvalidModel",
            Error::InvalidPenalty(_) => "InvalidPenalty",
            Error::InvalidStrategy(_) => "InvalidStrategy",
            Error::MultipleRoot(..) => "MultipleRoot",
            Error::RootNotConverged => "RootNotConverged",
            Error::DomainError(_) => "DomainError",
            Error::NoSecondBand => "NoSecondBand",
            Error::IterationCapExceeded(_) => "IterationCapExceeded",
            Error::KnotMismatch { .. } => "KnotMismatch",
            Error::UnsupportedModel => "UnsupportedModel",
        }
    }
}
