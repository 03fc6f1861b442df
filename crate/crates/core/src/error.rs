use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },

    #[error("delta potentials cannot be sampled on a grid")]
    NotGridRepresentable,

    #[error("zero pivot in tridiagonal elimination at row {row}")]
    ZeroPivot { row: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("DFT kernel sum diverges from the closed form at p={p} (relative error {rel_err:e})")]
    KernelDivergence { p: usize, rel_err: f64 },

    #[error("kernel sums for |x|={x}, k_y^2={ky2} were not precomputed")]
    KernelNotCached { x: f64, ky2: f64 },

    #[error("kernel table covers {available} steps, step {requested} requested")]
    KernelExhausted { available: usize, requested: usize },

    #[error("transverse spectrum not decayed at the Nyquist edge (relative amplitude {ratio:e})")]
    Aliasing { ratio: f64 },
}
