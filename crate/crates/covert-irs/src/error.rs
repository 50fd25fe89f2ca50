use thiserror::Error;

/// Errors surfaced by the library.
///
/// Solver *outcomes* (did not converge, hit a saddle, infeasible instance)
/// are not errors; they are reported through
/// [`SolveStatus`](crate::solve::SolveStatus).  This enum covers contract
/// violations and genuinely exceptional numerics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid channel parameters: {0}")]
    InvalidParams(String),

    #[error("argument {0} is outside the support [0, inf)")]
    NegativeArgument(f64),

    #[error("phase vector has {phases} entries but the cascade has {cascades}")]
    LengthMismatch { phases: usize, cascades: usize },

    #[error("cascade is empty")]
    EmptyCascade,

    #[error("solver requires {requirement} elements, got {got}")]
    ElementCount { requirement: &'static str, got: usize },

    #[error("target magnitude {target} lies outside the reachable range [{min}, {max}]")]
    InfeasibleMagnitude { target: f64, min: f64, max: f64 },

    #[error("cascade element with zero magnitude")]
    DegenerateElement,

    #[error("constructive split produced no bracket containing the target")]
    ConstructionFailed,

    #[error("phase entries must be finite, got {0}")]
    NonFinitePhase(f64),

    #[error("quadrature reached error estimate {achieved:e}, requested {requested:e}")]
    ToleranceNotReached { requested: f64, achieved: f64 },

    #[error("cannot parse channel realization: {0}")]
    Parse(String),
}
