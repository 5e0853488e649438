use thiserror::Error;

/// Chart point in the 4-dimensional coordinate domain.
pub type Point = [f64; 4];

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("jet truncation orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("jet base points differ")]
    BasePointMismatch,

    #[error("constant term vanishes where an invertible jet is required")]
    SingularJet,

    #[error("argument outside the function domain: {0}")]
    DomainError(&'static str),

    #[error("derivative requested of an order-0 jet")]
    OrderExhausted,

    #[error("{what} needs jet order >= {needed}, got {got}")]
    InsufficientOrder {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("linear solve hit a pivot below the degeneracy threshold")]
    SingularMatrix,

    #[error("distribution fails the Engel rank conditions at {0:?}")]
    EngelDegenerate(Point),

    #[error("Y is not tangent to the canonical line field at {0:?}")]
    NotD0Aligned(Point),

    #[error("scale normalization failed: {0}")]
    NormalizationFailed(String),

    #[error("manifold file: {0}")]
    Manifest(String),
}

pub type Result<T> = std::result::Result<T, Error>;
