use thiserror::Error;

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong when building states, running searches,
/// or fitting phases to observed recall rates.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Search spaces need at least two items.
    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    /// Basis index or marked item outside the state space.
    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    /// The explicit Walsh-Hadamard circuit only exists for 2^k items.
    #[error("dimension {0} is not a power of two; the explicit transform circuit needs 2^k items")]
    NotPowerOfTwo(usize),

    /// Phases must lie strictly inside (0, 2*pi).
    #[error("phase {0} lies outside the open interval (0, 2*pi)")]
    PhaseOutOfRange(f64),

    /// sin(phi/2) = 0 makes the optimal iteration count diverge.
    #[error("sin(phi/2) vanishes at phi = {0}; no finite optimal iteration count exists")]
    SingularPhase(f64),

    /// A state was handed to a search with a different dimension.
    #[error("state has {actual} amplitudes, expected {expected}")]
    DimensionMismatch { actual: usize, expected: usize },

    /// Construction from raw amplitudes with the wrong norm.
    #[error("state norm {0} deviates from 1 beyond tolerance")]
    NotNormalized(f64),

    /// Requested success probability above the feasibility ceiling.
    #[error(
        "target probability {target:.6} exceeds the feasible maximum {ceiling:.6} at n = {n}, j = {j}"
    )]
    InfeasibleTarget {
        target: f64,
        ceiling: f64,
        n: usize,
        j: u32,
    },

    /// Requested success probability at or below the starting value 1/n.
    #[error("target probability {target:.6} does not exceed the initial value 1/n = {initial:.6}")]
    BelowInitial { target: f64, initial: f64 },

    /// Phase fitting needs at least one search iteration.
    #[error("phase fitting needs at least one iteration, got j = 0")]
    ZeroIterations,

    /// One cell of an experiment table cannot be reached by any phase.
    #[error(
        "cell {cell}: observed probability {target:.6} exceeds the feasible maximum {ceiling:.6}"
    )]
    InfeasibleCell {
        cell: String,
        target: f64,
        ceiling: f64,
    },

    /// No branch choice satisfies the per-row phase-ordering constraints.
    #[error("no branch assignment satisfies the phase-ordering constraints")]
    NoConsistentAssignment,

    /// A malformed line in an experiment fixture file.
    #[error("fixture line {line}: {reason}")]
    Fixture { line: usize, reason: String },
}
