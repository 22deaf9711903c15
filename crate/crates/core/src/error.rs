use thiserror::Error;

/// Crate-wide error type. Variants map onto the CLI's exit-code classes:
/// precondition/usage problems, failed checks, and resource ceilings.
#[derive(Debug, Error)]
pub enum Error {
    #[error("interpolation nodes must have distinct abscissae (x = {0} repeated)")]
    DuplicateAbscissa(i64),

    #[error("expected {expected} interpolation points, got {got}")]
    BadPointCount { expected: usize, got: usize },

    #[error("degree bound mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("composition matrix entry ({row},{col}) is not an integer: {value}")]
    NonIntegralEntry {
        row: usize,
        col: usize,
        value: String,
    },

    #[error("multiplicative table has no value for prime {0}")]
    PrimeOutOfRange(u64),

    #[error("value at prime {prime} must be +1 or -1, got {value}")]
    BadPrimeValue { prime: u64, value: i64 },

    #[error("multiplicative functions are undefined at 0")]
    LambdaZero,

    #[error("support set must have exactly {expected} elements, got {got}")]
    BadSupportSize { expected: usize, got: usize },

    #[error("support set elements must be distinct and sorted")]
    BadSupportSet,

    #[error("pattern length {0} exceeds the 64-position limit")]
    PatternTooLong(u32),

    #[error("pattern string may contain only '+' and '-'")]
    BadPatternChar,

    #[error("pattern length mismatch: expected {expected}, got {got}")]
    PatternLengthMismatch { expected: u32, got: u32 },

    #[error("predicted work {predicted} candidates exceeds the budget of {budget}")]
    BudgetExceeded { predicted: u128, budget: u128 },

    #[error("window length k must be at least 1")]
    EmptyWindow,

    #[error("{0}")]
    BadArgument(String),

    #[error("residue {residue} is not divisible by {divisor} at modulus {modulus}")]
    NotDivisible {
        divisor: u128,
        residue: u128,
        modulus: u128,
    },

    #[error(
        "profinite component cannot be decided at depth {depth}: \
         prime {prime} requires at least depth {needed}"
    )]
    DepthExhausted { prime: u64, depth: u32, needed: u32 },

    #[error("profinite modulus {modulus} is not divisible by q^depth = {required}")]
    InsufficientModulus { modulus: u128, required: u128 },

    #[error("congruence class {residue} (mod {modulus}) has no members in [1, {bound}]")]
    UnsatisfiableCongruence {
        residue: u64,
        modulus: u64,
        bound: u64,
    },

    #[error("modulus for the twist must be at least 2, got {0}")]
    BadTwistModulus(u32),

    #[error("phi(q) = {phi} exceeds the bitset limit of {limit} (memory ceiling)")]
    PhiTooLarge { phi: u32, limit: u32 },

    #[error("residue {0} is not a unit mod {1}")]
    NotAUnit(u32, u32),

    #[error("the closed form requires d+2 to be a power of two, got d = {0}")]
    NotPowerOfTwo(u32),

    #[error("d must be at least {min}, got {got}")]
    DegreeTooSmall { min: u32, got: u32 },

    #[error("k must be at least d+1 = {min}, got {got}")]
    WindowTooShort { min: u32, got: u32 },

    #[error("configuration overflow: {0}")]
    ConfigOverflow(String),

    #[error("malformed {kind} file: {reason}")]
    MalformedFile { kind: &'static str, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
