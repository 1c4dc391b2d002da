//! Error type shared by every module of the crate.

use crate::gauss::GaussInt;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("argument must be nonzero")]
    ZeroArgument,
    #[error("argument {0} has even norm; operation requires odd norm")]
    EvenArgument(GaussInt),
    #[error("gcd(0, 0) is undefined")]
    BothZero,
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("modulus {modulus} exceeds budget: M(u) = {m} > {bound}")]
    ModulusTooLarge {
        modulus: GaussInt,
        m: u64,
        bound: u64,
    },
    #[error("factorization budget exceeded for {0}")]
    FactorizationBudget(u64),
    #[error("bump width nu = {0} outside (0, 1/10)")]
    NuOutOfRange(f64),
    #[error("summation interval is empty")]
    IntervalEmpty,
    #[error("set B is empty")]
    EmptySet,
    #[error("invalid set specification: {0}")]
    BadSpec(String),
    #[error("correlation requires Im(conj(z1)·z2) != 0")]
    DeltaZero,
    #[error("modulus {0} must have odd norm")]
    EvenModulus(GaussInt),
    #[error("argument {arg} is not coprime to modulus {modulus}")]
    NotCoprime { arg: GaussInt, modulus: GaussInt },
    #[error("memory budget exceeded: need {need_mb} MiB, cap {cap_mb} MiB (GPLAB_BUDGET_MB)")]
    BudgetExceeded { need_mb: u64, cap_mb: u64 },
    #[error("quadrature failed to converge: {0}")]
    QuadratureFailure(&'static str),
    #[error("X = {x} exceeds the 64-bit norm budget {budget}")]
    XTooLarge { x: u64, budget: u64 },
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
