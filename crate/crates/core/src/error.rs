use thiserror::Error;

/// Errors shared across the geometry, assignment and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A block or measure was requested over an empty sensor set where one is required.
    #[error("sensor set is empty")]
    EmptySensorSet,
    /// A sensor sits on top of the target position, so relative bearings are undefined.
    #[error("sensor {0} coincides with the target position")]
    Collision(u32),
    /// The same sensor id appeared twice where a set was expected.
    #[error("sensor {0} appears more than once")]
    DuplicateSensor(u32),
    /// Unique pairing needs two sensors per target.
    #[error("{sensors} sensors cannot cover {targets} targets with disjoint pairs")]
    TooFewSensors { sensors: usize, targets: usize },
    /// The relaxed problem needs at least as many sensor pairs as targets.
    #[error("{pairs} sensor pairs cannot cover {targets} targets")]
    TooFewPairs { pairs: usize, targets: usize },
    /// Exhaustive search was asked for an instance beyond its guard rails.
    #[error("instance too large for exhaustive search ({sensors} sensors, {targets} targets)")]
    InstanceTooLarge { sensors: usize, targets: usize },
    /// No full matching exists over the finite-weight edges.
    #[error("no feasible matching over finite-weight edges")]
    InfeasibleMatching,
    /// A covariance matrix could not be inverted.
    #[error("covariance matrix is singular")]
    SingularCovariance,
    /// A scenario or sweep configuration failed validation.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// Reading or writing an output file failed.
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
