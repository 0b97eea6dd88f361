use thiserror::Error;

/// Errors raised while synthesizing or evaluating a fractional regulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid fractional order {num}/{den}: {reason}")]
    InvalidOrder { num: i64, den: i64, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("order {num}/{den} is not odd/odd; the Hamiltonian mirror property does not hold")]
    EvenOrder { num: u64, den: u64 },

    #[error("Hamiltonian eigenvalue {re} + {im}i lies on (or too near) the imaginary axis")]
    ImaginaryAxisEigenvalue { re: f64, im: f64 },

    #[error("stable subspace block T1 is singular (condition {condition:e})")]
    SingularT1 { condition: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("eigenvalue solver failed on a {n}x{n} matrix")]
    EigenSolverFailure { n: usize },

    #[error("roots are not distinct (closest pair {gap:e} apart)")]
    DegenerateRoots { gap: f64 },

    #[error("mode {index} vanishes at the initial point (|y(x0)| = {value:e})")]
    VanishingModeValue { index: usize, value: f64 },

    #[error("solution has an imaginary residue {im:e} (real part {re:e})")]
    ImaginaryResidue { re: f64, im: f64 },
}

impl Error {
    /// Short name used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidOrder { .. } => "InvalidOrder",
            Error::InvalidInput(_) => "InvalidInput",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::EvenOrder { .. } => "EvenOrder",
            Error::ImaginaryAxisEigenvalue { .. } => "ImaginaryAxisEigenvalue",
            Error::SingularT1 { .. } => "SingularT1",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::EigenSolverFailure { .. } => "EigenSolverFailure",
            Error::DegenerateRoots { .. } => "DegenerateRoots",
            Error::VanishingModeValue { .. } => "VanishingModeValue",
            Error::ImaginaryResidue { .. } => "ImaginaryResidue",
        }
    }

    /// True for failures caused by bad user input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidOrder { .. } | Error::InvalidInput(_) | Error::DimensionMismatch { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
