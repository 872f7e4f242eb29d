use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero is not allowed here")]
    Zero,
    #[error("{value} is not squarefree (divisible by {factor}^2)")]
    NotSquarefree { value: i64, factor: u64 },
    #[error("{0} is not prime")]
    NotPrime(i64),
    #[error("{0} is divisible by 7; reduce it first")]
    DivisibleBySeven(i64),
    #[error("coefficient of q^{index} requested but the series is only known through q^{trunc}")]
    BeyondTruncation { index: usize, trunc: usize },
    #[error("gram matrix is not symmetric")]
    Asymmetric,
    #[error("gram matrix has an odd diagonal entry at position {0}")]
    OddDiagonal(usize),
    #[error("gram matrix is not positive definite (leading minor {0} is not positive)")]
    NotPositiveDefinite(usize),
    #[error("weight {weight} does not match the requested kind of Sturm bound")]
    WeightKindMismatch { weight: String },
    #[error("forms do not share weight, level and character")]
    MixedSpaces,
    #[error("level {0} must be divisible by 4")]
    LevelNotDivisibleByFour(u64),
    #[error("{p} divides the level {level}")]
    PrimeDividesLevel { p: u64, level: u64 },
    #[error("need coefficients through q^{needed}, have only q^{have}")]
    InsufficientTruncation { needed: usize, have: usize },
    #[error("{d1} and {d2} are not in the same square class at {p}")]
    SquareClassMismatch { d1: i64, d2: i64, p: u64 },
    #[error("tolerance {0:e} is below the double precision floor of 1e-8")]
    ToleranceBelowFloor(f64),
    #[error("theta decomposition of {name} disagrees with the fixture at q^{index}")]
    FixtureMismatch { name: String, index: usize },
    #[error("unknown fixture {0}")]
    UnknownFixture(String),
    #[error("malformed fixture data: {0}")]
    FixtureFormat(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}
