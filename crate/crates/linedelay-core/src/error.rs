//! Error type shared across the crate.

use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong when validating configurations, running
/// field arithmetic, or solving the absorbing chain.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An erasure probability lies outside `[0, 1)`.
    ErasureProbOutOfRange { index: usize, value: f64 },
    /// The link list is empty.
    NoLinks,
    /// Batch size is zero.
    ZeroBatchSize,
    /// Field exponent outside the supported `[1, 16]` range.
    FieldExponentOutOfRange { value: u32 },
    /// The reduction polynomial is not irreducible or has the wrong degree.
    ReduciblePolynomial { poly: u32, exponent: u32 },
    /// Zero has no multiplicative inverse.
    ZeroInverse,
    /// A coefficient vector's length does not match the tracker dimension.
    DimensionMismatch { expected: usize, got: usize },
    /// A node attempted to transmit with an empty store.
    EmptyStore,
    /// A trial exceeded the slot safety cap; the configuration is suspect.
    TrialCapExceeded { cap: u64 },
    /// The chain's state space exceeds the solver guard.
    StateSpaceTooLarge { states: u64, guard: u64 },
    /// The within-level system has a (numerically) absorbing self-loop.
    SingularSystem { state_index: usize },
    /// Closed-form delay rows exist only for batch sizes 1 through 4.
    ClosedFormOutOfRange { n: u64 },
    /// Two or more links tie for the worst erasure probability.
    TiedWorstLink,
    /// The first link must be strictly worse than every later link.
    FirstLinkNotWorst { index: usize, value: f64 },
    /// Deviation exponent outside the open interval (0, 1/2).
    DeltaOutOfRange { value: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ErasureProbOutOfRange { index, value } => write!(
                f,
                "erasure probability must be < 1 (and >= 0): link {} has p = {}",
                index + 1,
                value
            ),
            Error::NoLinks => write!(f, "at least one link required"),
            Error::ZeroBatchSize => write!(f, "batch size must be >= 1"),
            Error::FieldExponentOutOfRange { value } => {
                write!(f, "field exponent must lie in [1, 16], got {value}")
            }
            Error::ReduciblePolynomial { poly, exponent } => write!(
                f,
                "0x{poly:x} is not an irreducible polynomial of degree {exponent}"
            ),
            Error::ZeroInverse => write!(f, "zero has no multiplicative inverse"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "coefficient vector length {got}, tracker dimension {expected}")
            }
            Error::EmptyStore => write!(f, "cannot draw a combination from an empty store"),
            Error::TrialCapExceeded { cap } => {
                write!(f, "trial exceeded {cap} slots without completing")
            }
            Error::StateSpaceTooLarge { states, guard } => write!(
                f,
                "chain has {states} states, above the {guard} guard; use the Monte Carlo simulator instead"
            ),
            Error::SingularSystem { state_index } => {
                write!(f, "state {state_index} has self-loop probability 1; system is singular")
            }
            Error::ClosedFormOutOfRange { n } => {
                write!(f, "closed-form delay rows cover n in 1..=4, got {n}")
            }
            Error::TiedWorstLink => write!(f, "delay bound undefined: tied worst links"),
            Error::FirstLinkNotWorst { index, value } => write!(
                f,
                "first link not the worst: link {} has p = {} >= p_1",
                index + 1,
                value
            ),
            Error::DeltaOutOfRange { value } => {
                write!(f, "deviation exponent must lie in (0, 0.5), got {value}")
            }
        }
    }
}

impl core::error::Error for Error {}
