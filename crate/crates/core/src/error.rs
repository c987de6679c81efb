use thiserror::Error;

/// Errors raised while building lattices, bases, operators and spectra.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("{what} needs {projected} entries, which exceeds the configured cap of {cap}")]
    Capacity {
        what: &'static str,
        projected: u128,
        cap: u128,
    },

    #[error("non-finite sample at lattice index {index:?}")]
    Evaluation { index: [i64; 3] },

    #[error("coefficients were sampled on a different lattice")]
    LatticeMismatch,

    #[error("mode {0} is not part of this basis")]
    ModeNotInBasis(String),

    #[error("negative one-particle energy {value} for mode {mode}")]
    NegativeEnergy { mode: usize, value: f64 },

    #[error("operator dimension {found} does not match expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("assembled operator is not Hermitian (largest defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("dense diagonalization of dimension {dimension} exceeds the dense cap {cap}")]
    DenseCap { dimension: usize, cap: usize },

    #[error("Lanczos stopped after {iterations} iterations without converging (best residual {best_residual:e})")]
    NoConvergence { iterations: usize, best_residual: f64 },

    #[error("sector with label {label} contains no basis states")]
    EmptySector { label: i64 },

    #[error("operator couples sector {from} to sector {to}")]
    SectorNotInvariant { from: i64, to: i64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parameter(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}
