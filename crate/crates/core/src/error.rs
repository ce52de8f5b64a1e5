use crate::coxeter::CoxeterError;
use crate::polylin::PolyError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("degree cap exhausted: {0}")]
    DegreeCapExhausted(String),
    #[error("linear form does not separate the vertices")]
    NotSeparating,
    #[error("vertex set is not closed under the required action")]
    IncompatibleVertexSet,
    #[error("vertex set is not upwardly closed")]
    NotUpwardClosed,
    #[error("structure constants are not associative: {0}")]
    NonAssociative(String),
    #[error("degree-zero part is not spanned by idempotents")]
    GradingAssertFailed,
    #[error("radical is not nilpotent")]
    RadicalNotNilpotent,
    #[error("twisting routes disagree: {0}")]
    RouteMismatch(String),
    #[error("resolution too short")]
    ResolutionTooShort,
    #[error("word is not reduced")]
    NotReducedWord,
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
