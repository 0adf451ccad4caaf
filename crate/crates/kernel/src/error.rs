//! Error type shared across the kernel.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("branch point: lambda = 0 at z = {0}")]
    BranchPoint(Complex64),

    #[error("kappa/sigma pole at zeta in {{0, infinity}} (alpha = +-1) near z = {0}")]
    KappaSigmaPole(Complex64),

    #[error("pole of {what} inside the chart domain at z = {location}")]
    PoleInDomain { what: String, location: Complex64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("form degree error: {0}")]
    Degree(String),

    #[error("dbar solver failure: least-squares residual {residual:.3e} exceeds {tolerance:.3e}")]
    SolverFailure { residual: f64, tolerance: f64 },

    #[error("root finder did not converge; residual {0:.3e}")]
    RootFinding(f64),

    #[error("masked fraction {0:.1}% exceeds 20%")]
    MaskedTooMuch(f64),

    #[error("unknown surface '{0}'")]
    UnknownSurface(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, KernelError>;
