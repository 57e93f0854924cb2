use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("eigenvalues not converged: max shift {shift:.3e} GHz between dim {dim} and {doubled} exceeds tol {tol:.3e} GHz")]
    NotConverged {
        dim: usize,
        doubled: usize,
        shift: f64,
        tol: f64,
    },

    #[error("phase grid under-resolved: doubling moved level {level} by {rel:.3e} (relative)")]
    GridUnderResolved { level: usize, rel: f64 },

    #[error("levels {lower} and {upper} are degenerate within {gap:.3e} GHz; flux derivative is ill-defined")]
    Degenerate { lower: usize, upper: usize, gap: f64 },

    #[error("flux sweep failed at f = {flux} Phi0: {source}")]
    SweepPoint {
        flux: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("transition {i}-{j} at {f_ij:.4} GHz is within {detuning:.4} GHz of the cavity ({limit:.4} GHz required)")]
    NearResonance {
        i: usize,
        j: usize,
        f_ij: f64,
        detuning: f64,
        limit: f64,
    },

    #[error("inversion failed for {channel}: {reason}")]
    Inversion { channel: String, reason: String },

    #[error("unknown transition label {0:?}")]
    UnknownLabel(String),

    #[error("red sideband {label} is negative ({value:.4} GHz)")]
    NegativeSideband { label: String, value: f64 },

    #[error("singular Jacobian: data do not constrain all fit parameters (condition {condition:.3e})")]
    SingularJacobian { condition: f64 },

    #[error("fit did not converge after {iterations} iterations")]
    FitNotConverged { iterations: usize },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for failures of the numerics (as opposed to malformed input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NotConverged { .. }
            | Error::GridUnderResolved { .. }
            | Error::Degenerate { .. }
            | Error::NearResonance { .. }
            | Error::Inversion { .. }
            | Error::SingularJacobian { .. }
            | Error::FitNotConverged { .. } => true,
            Error::SweepPoint { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
