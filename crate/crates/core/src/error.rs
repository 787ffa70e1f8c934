use alloc::string::String;
use core::fmt;

use crate::array::StrengthWitness;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    NotPrimePower(u64),
    NotPowerOfTwo(u32),
    DivisionByZero,
    StrengthTooHigh { s: u32, t: u32 },
    InvalidArray(String),
    AlphabetMismatch(String),
    ShapeMismatch { left: usize, right: usize },
    RowCountMismatch { expected: usize, found: usize },
    ColumnOutOfRange { col: usize, cols: usize },
    SymbolOutOfRange { symbol: u32, levels: u32 },
    EmptyResult,
    NotDivisible { rows: usize, block: usize },
    TooFewRows,
    Uncertified,
    StrengthCheckFailed(StrengthWitness),
    NotADifferenceScheme(String),
    IngredientUnavailable(String),
    AssetCorrupt { name: String, reason: String },
    BadFactorization(String),
    BadGeometry { n: usize, d: u32 },
    NegativeM { k: u128, bound: u128 },
    NotPartitionable(String),
    DivisibilityViolated { product: u64, s: u32 },
    SBoundViolated { s: u32, s1: u32 },
    ExcludedS(u32),
    NotFromOA,
    ProvenanceMissing,
    VerificationFailed(String),
    BadParameter(String),
}

impl Error {
    /// True for the errors that mean an ingredient could not be found or
    /// built, as opposed to a bad request or a failed check.
    pub fn is_ingredient(&self) -> bool {
        matches!(
            self,
            Error::IngredientUnavailable(_) | Error::AssetCorrupt { .. } | Error::ExcludedS(_)
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPrimePower(q) => write!(f, "{q} is not a prime power"),
            Error::NotPowerOfTwo(s) => write!(f, "{s} is not a power of two"),
            Error::DivisionByZero => f.write_str("inverse of zero"),
            Error::StrengthTooHigh { s, t } => {
                write!(f, "strength {t} needs s >= t-1, got s = {s}")
            }
            Error::InvalidArray(msg) => write!(f, "invalid array: {msg}"),
            Error::AlphabetMismatch(msg) => write!(f, "alphabet mismatch: {msg}"),
            Error::ShapeMismatch { left, right } => {
                write!(f, "column counts differ: {left} vs {right}")
            }
            Error::RowCountMismatch { expected, found } => {
                write!(f, "replacement array has {found} rows, column has {expected} levels")
            }
            Error::ColumnOutOfRange { col, cols } => {
                write!(f, "column {col} out of range for {cols} columns")
            }
            Error::SymbolOutOfRange { symbol, levels } => {
                write!(f, "symbol {symbol} out of range for {levels} levels")
            }
            Error::EmptyResult => f.write_str("operation would leave no columns"),
            Error::NotDivisible { rows, block } => {
                write!(f, "{rows} rows do not split into blocks of {block}")
            }
            Error::TooFewRows => f.write_str("at least two rows are needed"),
            Error::Uncertified => f.write_str("input array carries no strength certificate"),
            Error::StrengthCheckFailed(w) => write!(f, "strength check failed: {w}"),
            Error::NotADifferenceScheme(msg) => write!(f, "not a difference scheme: {msg}"),
            Error::IngredientUnavailable(msg) => write!(f, "ingredient unavailable: {msg}"),
            Error::AssetCorrupt { name, reason } => write!(f, "asset {name} rejected: {reason}"),
            Error::BadFactorization(msg) => write!(f, "bad factorization: {msg}"),
            Error::BadGeometry { n, d } => write!(f, "length {n} is shorter than 2d = {}", 2 * d),
            Error::NegativeM { k, bound } => {
                write!(f, "K = {k} exceeds the Singleton bound {bound}")
            }
            Error::NotPartitionable(msg) => write!(f, "not partitionable: {msg}"),
            Error::DivisibilityViolated { product, s } => {
                write!(f, "factor product {product} does not divide s = {s}")
            }
            Error::SBoundViolated { s, s1 } => write!(f, "need s >= s1^2, got s = {s}, s1 = {s1}"),
            Error::ExcludedS(s) => write!(f, "s = {s} is excluded (no OA(s^2,5,s,2) route for s = 6 or 10)"),
            Error::NotFromOA => f.write_str("code carries no orthogonal-array origin"),
            Error::ProvenanceMissing => f.write_str("code has no provenance to cross-validate against"),
            Error::VerificationFailed(msg) => write!(f, "verification failed: {msg}"),
            Error::BadParameter(msg) => write!(f, "bad parameter: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
