//! Spectral theory of the linearized relativistic Vlasov-Maxwell system
//! around radial equilibria: reduced kernels, electric/magnetic dispersion
//! functions and their roots (including the damped continuation past the
//! threshold wavenumber), temporal Green functions with an
//! oscillatory/regular split, and per-Fourier-mode time-domain solutions
//! cross-checked against a velocity-discretized kinetic oracle.

pub mod cli;
pub mod dispersion;
pub mod equilibrium;
pub mod green;
pub mod kernels;
pub mod numerics;
pub mod report;
pub mod solver;

use thiserror::Error;

pub type C64 = num_complex::Complex64;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported feature: {0}")]
    Unsupported(String),
    #[error("numerical convergence failure: {0}")]
    Convergence(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for validation problems, 3 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Unsupported(_) | Error::Config(_) | Error::Io(_) => 2,
            Error::Convergence(_) => 3,
        }
    }
}
