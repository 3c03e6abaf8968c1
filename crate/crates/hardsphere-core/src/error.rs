//! Error type shared across the crate.

use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Points of different ambient dimension were mixed.
    DimensionMismatch { expected: usize, found: usize },
    /// A parameter failed validation (NaN, negative radius, ...).
    InvalidParameter(&'static str),
    /// Construction of a configuration hit two identical points.
    DuplicatePoint,
    /// An operation requiring disjoint configurations got a shared point.
    ConfigurationsOverlap,
    /// A boundary point lies inside the region it should condition.
    BoundaryInsideRegion,
    /// The exact series oracle only exists in one dimension.
    NotOneDimensional,
    /// Volume of a ball-carved region needs Monte Carlo samples.
    VolumeNeedsSamples,
    /// An estimator was asked for zero samples or replicas.
    ZeroSamples,
    /// The rejection sampler exhausted its attempt budget; the observed
    /// acceptance rate signals how far out of reach the parameters are.
    RejectionExhausted { attempts: u64, acceptance: f64 },
    /// A thinning ratio estimate saw no feasible draw in its denominator.
    ConditionInfeasible,
    /// The twisted-coupling zone was requested on an empty disagreement zone.
    DisagreementZoneEmpty,
    /// The twisted recursion exceeded its depth cap; indicates a geometry bug.
    RecursionCapExceeded { depth: u32, cap: u32 },
    /// A decay fit was attempted with fewer than three usable points.
    InsufficientDecayData { available: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::DuplicatePoint => write!(f, "configuration points must be distinct"),
            Error::ConfigurationsOverlap => write!(f, "configurations must be disjoint"),
            Error::BoundaryInsideRegion => {
                write!(f, "boundary condition points must lie outside the region")
            }
            Error::NotOneDimensional => write!(f, "series oracle is 1D only"),
            Error::VolumeNeedsSamples => write!(f, "volume estimator requires samples"),
            Error::ZeroSamples => write!(f, "estimator requires a positive sample count"),
            Error::RejectionExhausted { attempts, acceptance } => write!(
                f,
                "rejection sampler exhausted {attempts} attempts \
                 (observed acceptance rate {acceptance:.3e}); reduce lambda*volume"
            ),
            Error::ConditionInfeasible => write!(f, "condition infeasible"),
            Error::DisagreementZoneEmpty => {
                write!(f, "zone coupling requires nonempty disagreement zone")
            }
            Error::RecursionCapExceeded { depth, cap } => {
                write!(f, "twisted recursion depth {depth} exceeded cap {cap}")
            }
            Error::InsufficientDecayData { available } => {
                write!(f, "insufficient decay data: {available} positive points, need 3")
            }
        }
    }
}

impl core::error::Error for Error {}
