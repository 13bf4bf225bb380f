use core::fmt;

use crate::coherence::DiagonalKind;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A vector did not have the length the operator works on.
    DimensionMismatch { expected: usize, found: usize },
    /// The dimension is not supported by the basis kind.
    InvalidDimension { n: usize, reason: &'static str },
    /// Wavelet depth outside `1..=log2(n)`.
    InvalidLevels { levels: u32, max: u32 },
    /// A modulation entry does not have unit magnitude.
    InvalidModulation { index: usize, magnitude: f64 },
    IndexOutOfRange { index: usize, n: usize },
    DuplicateIndex { index: usize },
    /// A profile or probability entry outside its allowed range.
    InvalidProbability { index: usize, value: f64 },
    /// A probability vector whose entries do not sum to one.
    NotNormalized { sum: f64 },
    KindMismatch { expected: DiagonalKind, found: DiagonalKind },
    EmptyDataset,
    SupportSize { index: usize, expected: usize, found: usize },
    InvalidParameter { name: &'static str, value: f64 },
    /// `K_τ` is empty because `n·τ > m`.
    Infeasible { n: usize, tau: f64, m: f64 },
    /// A budget larger than the number of indices cannot be met by a profile.
    BudgetTooLarge { m: f64, n: usize },
    NonConvergence { iterations: usize, residual: f64 },
    /// A basis descriptor that does not name a parseable kind.
    UnknownBasis,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidDimension { n, reason } => write!(f, "invalid dimension {n}: {reason}"),
            Error::InvalidLevels { levels, max } => {
                write!(f, "wavelet levels {levels} outside 1..={max}")
            }
            Error::InvalidModulation { index, magnitude } => {
                write!(f, "modulation entry {index} has magnitude {magnitude}, expected 1")
            }
            Error::IndexOutOfRange { index, n } => {
                write!(f, "index {index} out of range for dimension {n}")
            }
            Error::DuplicateIndex { index } => write!(f, "duplicate index {index}"),
            Error::InvalidProbability { index, value } => {
                write!(f, "entry {index} = {value} is not a valid probability")
            }
            Error::NotNormalized { sum } => write!(f, "probabilities sum to {sum}, expected 1"),
            Error::KindMismatch { expected, found } => {
                write!(f, "expected a {expected:?} diagonal, found {found:?}")
            }
            Error::EmptyDataset => f.write_str("support dataset is empty"),
            Error::SupportSize { index, expected, found } => write!(
                f,
                "support {index} has {found} indices, expected {expected}"
            ),
            Error::InvalidParameter { name, value } => {
                write!(f, "invalid value {value} for parameter `{name}`")
            }
            Error::Infeasible { n, tau, m } => {
                write!(f, "K_tau is empty: n·tau = {} exceeds m = {m}", *n as f64 * tau)
            }
            Error::BudgetTooLarge { m, n } => {
                write!(f, "budget {m} exceeds the number of indices {n}")
            }
            Error::NonConvergence { iterations, residual } => write!(
                f,
                "no convergence after {iterations} iterations (residual {residual:e})"
            ),
            Error::UnknownBasis => f.write_str(
                "unknown basis; expected dirac, fourier, hadamard, haar[:levels] or daubechies4[:levels]"
            ),
        }
    }
}

impl core::error::Error for Error {}
