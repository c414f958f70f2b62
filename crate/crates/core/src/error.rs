use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("truncation degree must be even and at least 2 (got {0})")]
    BadTruncation(i32),
    #[error("too many variables ({0}); at most {max} are supported", max = crate::formring::MAX_VARS)]
    TooManyVariables(usize),
    #[error("operands belong to different rings")]
    MixedRings,
    #[error("form is not a unit: {0}")]
    NotInvertible(String),
    #[error("variable `{0}` does not allow negative powers")]
    NotLaurent(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("q-exponent {exponent}/8 is outside the truncation range (order {order}/8)")]
    OutOfRange { exponent: i64, order: i64 },
    #[error("series has support off the half-integer lattice at q^({0}/8)")]
    OffHalfLattice(i64),
    #[error("exponential argument is not nilpotent: {0}")]
    NotNilpotent(String),
    #[error("weight must be positive and even (got {0})")]
    BadWeight(i64),
    #[error("undeclared bundle generator `{0}`")]
    UndeclaredGenerator(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unknown identifier `{0}`")]
    UnknownId(String),
    #[error("relation order q^({order}/8) is not beyond the solved pivots")]
    RelationOrder { order: i64 },
}

pub type Result<T> = std::result::Result<T, Error>;
