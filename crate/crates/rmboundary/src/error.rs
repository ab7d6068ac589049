use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("discriminant mismatch: {0} vs {1}")]
    DiscriminantMismatch(i64, i64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid discriminant {0}")]
    InvalidDiscriminant(i64),
    #[error("real embedding requested for negative discriminant {0}")]
    NegativeDiscriminantForRealEmbedding(i64),
    #[error("operation requires a positive discriminant, got {0}")]
    NegativeDiscriminant(i64),
    #[error("parse error: {0}")]
    Parse(String),

    #[error("zero ideal")]
    ZeroIdeal,
    #[error("not an ideal: {0}")]
    NotAnIdeal(String),
    #[error("ideal is not invertible")]
    NotInvertible,
    #[error("prime {0} divides the conductor")]
    ConductorDivides(u64),
    #[error("{0} is not coprime to the conductor {1}")]
    NotCoprimeToConductor(u64, u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("ideal is not primitive")]
    NotPrimitive,
    #[error("ideal has norm {found}, expected {expected}")]
    WrongNorm { expected: u64, found: String },

    #[error("degenerate form")]
    Degenerate,
    #[error("sublattice is rank deficient")]
    RankDeficient,
    #[error("classes do not form a direct sum decomposition")]
    NotDirectSum,
    #[error("class orders are wrong or not a divisor chain")]
    WrongOrders,
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("not a smart basis")]
    NotSmartBasis,
    #[error("entry does not decompose in the expected ideal: {0}")]
    DecompositionFails(String),
    #[error("element is not in the modular group")]
    NotInGamma,
    #[error("norm mismatch")]
    NormMismatch,
    #[error("determinant is not 1")]
    NotUnimodular,

    #[error("lattice is not an order: {0}")]
    NotAnOrder(String),
    #[error("degenerate line")]
    DegenerateLine,
    #[error("singular Gram matrix")]
    SingularGram,
    #[error("coincident points")]
    CoincidentPoints,
    #[error("phase {0} is not a fourth root of unity")]
    PhaseNotRepresentable(String),
    #[error("unsupported stratum kind: {0}")]
    UnsupportedStratum(String),
    #[error("weights must be nonzero")]
    ZeroWeight,
    #[error("2n+1 = {0} is a perfect square")]
    SquareDiscriminant(u64),
    #[error("check failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
