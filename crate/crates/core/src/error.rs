use std::fmt;

use thiserror::Error;

/// A pair of body indices (zero-based) attached to singular-pair failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pair(pub usize, pub usize);

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Collision or antipodal pair: the dot product sits on (or past) the
    /// boundary of the arccos/arccosh domain.
    #[error("singular pair{}", .0.map(|p| format!(" {p}")).unwrap_or_default())]
    SingularPair(Option<Pair>),

    #[error("point too close to the projection pole")]
    ProjectionPole,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("operation requires curvature sign {expected}")]
    WrongSign { expected: i8 },

    #[error("configuration spans rank {rank} (< 2)")]
    DegenerateConfig { rank: usize },

    #[error("bodies do not share a common zw phase")]
    NotCoplanar,

    #[error("every body sits on the zw axis; xy gauge is undefined")]
    GaugeDegenerate,

    #[error("no real spin pair for s = {s} at lambda = {lambda}")]
    InfeasibleSpin { lambda: f64, s: f64 },

    #[error("(c, theta) = ({c}, {theta}) lies outside the positive-mass region")]
    RegionInvalid { c: f64, theta: f64 },

    #[error("no positive mass balances the axis bodies for (c, theta) = ({c}, {theta})")]
    NoMassSolution { c: f64, theta: f64 },

    #[error("lambda(c, theta) has no sign change for c = {c}")]
    NoSignChange { c: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn singular(i: usize, j: usize) -> Self {
        Error::SingularPair(Some(Pair(i, j)))
    }

    /// Attach body indices to a bare singular-pair error.
    pub(crate) fn at_pair(self, i: usize, j: usize) -> Self {
        match self {
            Error::SingularPair(None) => Error::singular(i, j),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
