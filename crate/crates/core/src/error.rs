use thiserror::Error;

/// Errors raised by the arithmetic, group construction and verification layers.
///
/// Moduli and residues are reported as `u64` regardless of the word type used
/// for storage.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus must be at least 1")]
    ZeroModulus,

    #[error("modulus {0} exceeds the supported maximum of 2^31")]
    ModulusTooLarge(u128),

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },

    #[error("{value} is not a unit modulo {modulus}")]
    NotAUnit { value: u64, modulus: u64 },

    #[error("cannot divide {numerator} by 4 modulo even modulus {modulus}")]
    EvenModulus { numerator: i64, modulus: u64 },

    #[error("modulus {modulus} has the wrong parity for these parameters")]
    ParityMismatch { modulus: u64 },

    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),

    #[error("conductor must be at least 1, got {0}")]
    BadConductor(i64),

    #[error("discriminant {0} is not negative")]
    NotImaginary(i64),

    #[error("{divisor} does not divide {modulus}")]
    NotADivisor { divisor: u64, modulus: u64 },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("generator {0} is not invertible")]
    NonInvertibleGenerator(String),

    #[error("element count exceeds the configured budget of {0}")]
    ClosureBudgetExceeded(usize),

    #[error("group does not carry Cartan parameters")]
    NotCartan,

    #[error("tower has no level {0}")]
    MissingLevel(u32),

    #[error("tower levels are not contiguous")]
    NonContiguousLevels,

    #[error("level {level} does not reduce into level {below}: {element} escapes")]
    TowerNotCompatible {
        level: u32,
        below: u32,
        element: String,
    },

    #[error("{0} has no preimage one level up")]
    EmptyFiber(String),

    #[error("lift is not well defined: {element} has preimages {first} (det {first_det}) and {second} (det {second_det})")]
    LiftNotWellDefined {
        element: String,
        first: String,
        first_det: u64,
        second: String,
        second_det: u64,
    },

    #[error("{0} is not an element of the group")]
    ElementNotInGroup(String),

    #[error("cannot parse matrix {0:?}: expected \"a11,a12,a21,a22\"")]
    ParseMatrix(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
