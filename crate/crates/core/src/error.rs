use thiserror::Error;

/// Errors raised by the walk library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("parameter `{name}` = {value} is outside its domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("state norm {norm} differs from 1 by more than {tolerance}")]
    NotNormalized { norm: f64, tolerance: f64 },

    #[error("time {t} reaches the wraparound horizon N/2 = {half} of an N = {n} cycle")]
    Wraparound { t: usize, half: usize, n: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("truncation too small: |alpha| at the lattice edge reached {leakage:e}; use n_max >= {required}")]
    Leakage { leakage: f64, required: usize },

    #[error("norm drifted by {drift:e} during integration (limit {limit:e}); reduce dt")]
    NormDrift { drift: f64, limit: f64 },

    #[error("step-doubling check failed: halving dt changed P(t_max) by {delta:e} (limit {limit:e})")]
    StepDoubling { delta: f64, limit: f64 },

    #[error("eigensolver did not converge for block {block}")]
    Eigensolver { block: usize },
}

pub type Result<T> = std::result::Result<T, WalkError>;
