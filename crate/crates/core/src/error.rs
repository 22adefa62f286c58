use thiserror::Error;

/// Errors raised by the link simulator and the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("chebyshev map input {0} is outside [-1, 1]")]
    ChaosDomain(f64),

    #[error("seed {0} is a fixed or eventually-fixed point of the chebyshev map")]
    DegenerateSeed(f64),

    #[error("walsh order {0} is not a power of two >= 2")]
    WalshOrder(usize),

    #[error("index symbol {index} outside 1..={order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("expected {expected} index bits, got {actual}")]
    BitLength { expected: usize, actual: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid frame geometry: {0}")]
    FrameGeometry(String),

    #[error("invalid link model: {0}")]
    InvalidLink(String),

    #[error("path delay {delay} is not shorter than the frame ({frame_len} chips)")]
    DelayTooLong { delay: usize, frame_len: usize },

    #[error("invalid system configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid simulation request: {0}")]
    InvalidRequest(String),

    #[error("SNR must be positive, got {0}")]
    NonPositiveSnr(f64),

    #[error("unequal-power profile needs distinct average SNRs, {0} and {1} are too close")]
    DuplicatePathPower(f64, f64),

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("probability {0} is outside [0, 1] beyond rounding")]
    ProbabilityRange(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
