use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("reduced-expression set exceeds the cap of {cap}")]
    InfiniteRexSet { cap: usize },
    #[error("expressions do not express the same element")]
    NotSameElement,
    #[error("expression is not reduced: {0}")]
    NotReduced(String),
    #[error("Bruhat interval exceeds the cap of {cap} elements")]
    IntervalTooLarge { cap: usize },
    #[error("invalid realization: {}", .0.join("; "))]
    InvalidRealization(Vec<String>),
    #[error("polynomial division by a root was not exact")]
    DivisionNotExact,
    #[error("degree bound {0} exceeds the configured cap")]
    DegreeBoundTooLarge(i32),
    #[error("2m-valent evaluation unsupported for m = {0}")]
    UnsupportedValence(String),
    #[error("degree {needed} exceeds the evaluation bound {bound}")]
    DegreeBoundExceeded { needed: i32, bound: i32 },
    #[error("double-leaf evaluations are linearly dependent for Hom({domain}, {codomain}) in degree {degree}")]
    EvaluationNotFaithful { domain: String, codomain: String, degree: i32 },
    #[error("morphism is not in the span of the double leaves of Hom({domain}, {codomain})")]
    NotInSpan { domain: String, codomain: String },
    #[error("lifting a differential entry failed: {0}")]
    LiftFailed(String),
    #[error("window {window} is insufficient; the complex needs {needed}")]
    WindowInsufficient { window: i32, needed: i32 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("not equivalent within window: {0}")]
    NotEquivalent(String),
    #[error("independent checks disagree: {0}")]
    Inconsistent(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cache error: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
