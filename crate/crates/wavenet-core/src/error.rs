//! Error types shared across the crate.

use thiserror::Error;

/// Unified error for signal, operator, engine and solver failures.
#[derive(Debug, Error)]
pub enum WaveError {
    /// A signal failed a structural check (length mismatch, non-finite
    /// samples, or an empty transform window).
    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    /// A transform window does not fit inside the signal's grid.
    #[error("window [{start}, {end}) outside grid [0, {duration})")]
    WindowOutOfRange { start: i64, end: i64, duration: i64 },

    /// No spectral peak satisfied the query.
    #[error("no peak found: {0}")]
    NoPeakFound(String),

    /// A delay pushed non-zero samples past the end of the grid.
    #[error("delay of {delay} time-units overflows the grid")]
    GridOverflow { delay: i64 },

    /// Filter bounds are unusable on the signal's grid.
    #[error("invalid filter: {0}")]
    InvalidFilter(String),

    /// The network violates a structural invariant.
    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    /// A network was asked to act as a linear chain but is not one.
    #[error("not a chain: {0}")]
    NotAChain(String),

    /// A frequency plan failed its uniqueness validation.
    #[error("invalid frequency plan: {0}")]
    InvalidFrequencyPlan(String),

    /// No sum-frequency signal returned within the run horizon.
    #[error("no Hamiltonian cycle signal found by horizon {horizon}")]
    NoHamiltonianFound { horizon: i64 },

    /// A decode pass produced a witness inconsistent with the optimum.
    #[error("decode inconsistent: {0}")]
    DecodeInconsistent(String),

    /// An oracle was invoked beyond its size precondition.
    #[error("oracle too large: {0}")]
    OracleTooLarge(String),

    /// A problem instance violates an invariant.
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// An instance or report file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// Configuration rejected by a module precondition.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, WaveError>;
