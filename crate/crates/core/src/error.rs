//! Error type shared by every module.

use thiserror::Error;

/// All recoverable failures of the engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid inner product: {0}")]
    InvalidInnerProduct(String),
    #[error("cone is not strongly convex")]
    NotStronglyConvex,
    #[error("cone has a zero ray")]
    ZeroRay,
    #[error("cone is not simplicial")]
    NotSimplicial,
    #[error("cones {0} and {1} intersect in a set that is not a common face")]
    IntersectionNotFace(usize, usize),
    #[error("maximal cones {0} and {1} overlap; common interior point {2}")]
    OverlappingCones(usize, usize, String),
    #[error("fan is not complete: {0}")]
    NotComplete(String),
    #[error("support vector is not a polytope with this normal fan: {0}")]
    NotInPOfSigma(String),
    #[error("singular vertex system: {0}")]
    SingularSystem(String),
    #[error("unknown cone index {0}")]
    UnknownCone(usize),
    #[error("support vectors live on different fans")]
    FanMismatch,
    #[error("empty input")]
    EmptyInput,
    #[error("unbounded term in a convolution")]
    UnboundedTerm,
    #[error("chain has non-cancelling unbounded support")]
    DivergentChain,
    #[error("arrangement has {0} hyperplanes, above the exact-mode cap {1}")]
    ArrangementTooLarge(usize, usize),
    #[error("ξ is not generic: edge {edge} at vertex {vertex} is orthogonal to it")]
    NonGenericXi { vertex: String, edge: String },
    #[error("cones do not form a face pair")]
    NotAFacePair,
    #[error("fan is not acute: rays {0} and {1} meet at an obtuse angle")]
    NotAcute(usize, usize),
    #[error("partition violated at {0}")]
    PartitionViolation(String),
    #[error("no convergence certificate: {0}")]
    NoCertificate(String),
    #[error("quadrature did not reach tolerance (best estimate {best}, error {error})")]
    QuadratureStall { best: f64, error: f64 },
    #[error("expression error: {0}")]
    Expr(String),
    #[error("poset mismatch")]
    PosetMismatch,
    #[error("insufficient samples: need {need}, have {have}")]
    InsufficientSamples { need: usize, have: usize },
    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),
    #[error("coset enumeration too large: {0} representatives")]
    CosetEnumerationTooLarge(String),
    #[error("polyhedron has a lineality space")]
    HasLineality,
}

pub type Result<T> = std::result::Result<T, Error>;
