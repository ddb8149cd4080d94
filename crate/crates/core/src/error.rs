//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A config failed validation; carries the first violation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Some Ω_σ(t) = 0 where a mixing angle is required; the dark subspace
    /// is degenerate there. Use `polariton::dark_subspace` instead.
    #[error("degenerate mixing angles at t = {t}: {detail}; use dark_subspace")]
    DegenerateAngles { t: f64, detail: String },

    /// Operation requires the straight-line coupling topology.
    #[error("config is not a straight-line topology: {0}")]
    NotStraightLine(String),

    /// Operation requires the cross-line coupling topology.
    #[error("config is not a cross-line topology: {0}")]
    NotCrossLine(String),

    /// Time outside a schedule's domain [0, T].
    #[error("time {t} outside schedule domain [0, {duration}]")]
    TimeOutOfDomain { t: f64, duration: f64 },

    /// Schedules expected to be ratio-locked are not.
    #[error("protocol error: {0}")]
    RatioLock(String),

    /// The tracked dark subspace changed dimension along the evolution path.
    #[error("dark-subspace degeneracy crossing at t = {t}: nullity {found}, expected {expected}")]
    DegeneracyCrossing { t: f64, found: usize, expected: usize },

    /// Mode-count mismatch between a state and an operator.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A state with (numerically) zero norm, e.g. the "−" cat at α₀ = 0.
    #[error("degenerate state: {0}")]
    DegenerateState(String),

    /// A cat state not of the shape an operation requires.
    #[error("state shape error: {0}")]
    StateShape(String),

    /// Truncated Fock construction would need an occupation above the cutoff.
    #[error("Fock truncation overflow: {0}")]
    TruncationOverflow(String),

    /// Truncated Fock space would exceed the desk-scale dimension guard.
    #[error("Fock dimension {dim} exceeds guard {guard}")]
    DimensionGuard { dim: usize, guard: usize },

    /// Run specification rejected before execution.
    #[error("invalid run spec: {0}")]
    InvalidRunSpec(String),

    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
