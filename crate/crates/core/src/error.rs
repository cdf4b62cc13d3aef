use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice parameters: {0}")]
    InvalidParams(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected} amplitudes, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("singular similarity transform in cell {cell}: gamma = {gamma} is not in [0, kappa = {kappa})")]
    SingularTransform { cell: usize, gamma: f64, kappa: f64 },

    #[error("defect state is not localized (r = {r}, need r > 1)")]
    NotLocalized { r: f64 },

    #[error("no in-gap bound state: kappa_0^2 - kappa_d^2 = {gap_sq} <= nu^2")]
    NoBoundState { gap_sq: f64 },

    #[error(
        "tridiagonal eigensolver did not converge for eigenvalue {index} after {iterations} \
         iterations (remaining off-diagonal {residual:e})"
    )]
    NoConvergence {
        index: usize,
        iterations: usize,
        residual: f64,
    },

    #[error("integration blew up at t = {time}: total intensity {total:e} exceeds limit {limit:e}")]
    BlowUp { time: f64, total: f64, limit: f64 },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::BlowUp { .. }
                | Error::NoConvergence { .. }
                | Error::NotLocalized { .. }
                | Error::NoBoundState { .. }
        )
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
