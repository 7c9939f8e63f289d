use core::fmt;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Product of subsystem dimensions does not match the matrix dimension.
    DimensionMismatch { expected: usize, found: usize },
    /// Input to the Hermitian eigensolver deviates from Hermitian by `deviation`.
    NotHermitian { deviation: f64 },
    /// A mixing parameter was outside `[0, 1]`.
    ParamOutOfRange { value: f64 },
    /// A box table row does not sum to one.
    NotNormalized { x: u8, y: u8, total: f64 },
    /// A box composition did not produce a normalized distribution.
    IllPosedComposition { x: u8, y: u8, total: f64 },
    /// A wiring encoding used reserved bits.
    InvalidEncoding(u32),
    /// Subsystem index out of range for a partial trace.
    InvalidSubsystem(usize),
    /// A box table entry is negative or not a number.
    InvalidDistribution { index: usize, value: f64 },
    /// A purity map of degree above two was offered where a quadratic is required.
    NotQuadratic { degree: usize },
    /// The no-go analysis needs `0 < p_s < 1`.
    InvalidThreshold(f64),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotHermitian { deviation } => {
                write!(f, "matrix is not Hermitian (max deviation {deviation:e})")
            }
            Error::ParamOutOfRange { value } => {
                write!(f, "mixing parameter {value} is outside [0, 1]")
            }
            Error::NotNormalized { x, y, total } => {
                write!(f, "row (x={x}, y={y}) of the box table sums to {total}")
            }
            Error::IllPosedComposition { x, y, total } => write!(
                f,
                "ill-posed composition: row (x={x}, y={y}) sums to {total}"
            ),
            Error::InvalidEncoding(code) => {
                write!(f, "wiring encoding {code:#010x} sets reserved bits")
            }
            Error::InvalidSubsystem(i) => write!(f, "subsystem index {i} out of range"),
            Error::InvalidDistribution { index, value } => {
                write!(f, "box table entry {index} is invalid ({value})")
            }
            Error::NotQuadratic { degree } => {
                write!(f, "polynomial of degree {degree} is not a two-copy purity map")
            }
            Error::InvalidThreshold(p) => write!(f, "threshold {p} is outside (0, 1)"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
