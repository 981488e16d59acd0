use thiserror::Error;

/// Failure modes shared across the crate.
///
/// Numerical routines return `Err` rather than NaN so callers can tell a
/// degenerate problem apart from a bad estimate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An index map repeats or skips an index, so it is not a permutation.
    #[error("index map {0:?} is not a bijection on 0..{1}")]
    NotABijection(Vec<usize>, usize),

    /// Two vectors that must share a length do not.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// A sort key is NaN, so no total order exists.
    #[error("sort key at index {0} is NaN")]
    InvalidKey(usize),

    /// q0 + q1 = 1: the flipping channel output is independent of its input.
    #[error("uninformative channel: q0 + q1 = 1")]
    DegenerateChannel,

    /// Fisher information underflowed; no finite error bound exists.
    #[error("Fisher information is numerically zero")]
    ZeroInformation,

    /// A candidate amplitude lies outside [-delta, delta].
    #[error("theta {theta} outside [-{delta}, {delta}]")]
    ThetaOutOfBounds { theta: f64, delta: f64 },

    /// (tau, h) admit no relation c*tau + d*h = e*1, so the one-shot
    /// reordering estimator does not apply.
    #[error("(tau, h) do not satisfy any special-case relation")]
    NotSpecialCase,

    /// h is the zero vector; amplitude has no effect on the observations.
    #[error("h is identically zero")]
    DegenerateShape,

    /// Tied success probabilities leave no gap to normalize by.
    #[error("minimum gap between sorted success probabilities is zero")]
    ZeroGap,

    /// A power-law fit needs at least two distinct grid points.
    #[error("degenerate fit: {0}")]
    DegenerateFit(&'static str),

    /// Model parameters fail validation.
    #[error("invalid model: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
