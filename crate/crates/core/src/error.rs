use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong while building, reducing or simulating a system.
///
/// Variants split into two families: validation problems (bad input data,
/// inconsistent dimensions, malformed files) and numerical failures (singular
/// or unstable pencils, non-converging iterations). [`Error::is_numerical`]
/// tells them apart; the command-line front end maps them to exit codes 2 and 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is singular to working precision ({context})")]
    SingularMatrix { context: String },

    #[error("{what} did not converge within {iterations} iterations")]
    ConvergenceFailure { what: &'static str, iterations: usize },

    #[error("matrix is indefinite: eigenvalue {eigenvalue:e} below -{threshold:e}")]
    IndefiniteMatrix { eigenvalue: f64, threshold: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry in {0}")]
    NonFinite(String),

    #[error("quadratic pencil is singular at s = {re}{im:+}i")]
    SingularPencil { re: f64, im: f64 },

    #[error("pencil is not asymptotically stable (spectral abscissa {abscissa:e})")]
    UnstablePencil { abscissa: f64 },

    #[error("matrix has odd dimension {0}, expected 2n")]
    OddDimension(usize),

    #[error("requested order {requested} exceeds the {available} nonzero singular values")]
    RankDeficient { requested: usize, available: usize },

    #[error("singular value spectrum is empty")]
    EmptySpectrum,

    #[error("input signal does not decay (beta = {0}), its H-infinity norm is unbounded")]
    NonDecayingInput(f64),

    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),

    #[error("relative residual {residual:e} of the {equation} equation exceeds {tolerance:e}")]
    ResidualContract { equation: &'static str, residual: f64, tolerance: f64 },

    #[error("trajectories are sampled on different grids")]
    GridMismatch,

    #[error("time-step matrix E - (h/2)A is singular")]
    SingularStepMatrix,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("projection has full rank {0}, no orthogonal direction exists")]
    FullRank(usize),

    #[error("{}:{line}: {message}", file.display())]
    Parse { file: PathBuf, line: usize, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures of the numerics rather than of the input data.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularMatrix { .. }
                | Error::ConvergenceFailure { .. }
                | Error::IndefiniteMatrix { .. }
                | Error::SingularPencil { .. }
                | Error::UnstablePencil { .. }
                | Error::RankDeficient { .. }
                | Error::EmptySpectrum
                | Error::NumericalInconsistency(_)
                | Error::ResidualContract { .. }
                | Error::SingularStepMatrix
                | Error::FullRank(_)
        )
    }

    pub(crate) fn singular(context: impl Into<String>) -> Self {
        Error::SingularMatrix { context: context.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
