use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("exact backing needs a rational coupling, got {0}")]
    NonRational(f64),

    #[error("point {x} lies outside the support bands")]
    OutsideBands { x: f64 },

    #[error("point {x} is a pole of the Stieltjes transform (mass {mass})")]
    Pole { x: f64, mass: f64 },

    #[error("quadrature did not converge: last two levels differ by {difference:e}")]
    NonConvergence { difference: f64 },

    #[error("Richardson extrapolation failed: {0}")]
    Extrapolation(String),

    #[error("continued fraction hit a near-zero denominator at depth {depth}")]
    NearZeroDenominator { depth: usize },

    /// An identity that must hold by construction was violated.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
