use thiserror::Error;

/// Errors raised by the numerical laboratory.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite value at {location}")]
    NonFinite { location: String },

    #[error(
        "possibly not in H^2: integral means grew by a factor {ratio:.3} between radii {from} and {to}"
    )]
    PossiblyNotInH2 { ratio: f64, from: f64, to: f64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("Newton iteration diverged: {0}")]
    NewtonDivergence(String),

    #[error("flow left resolvable region: {0}")]
    FlowLeftRegion(String),

    #[error("not a valid generator: {0}")]
    InvalidGenerator(String),

    #[error("singular generator: {0}")]
    SingularGenerator(String),

    #[error("not a self-map: |phi(z)| = {modulus} at z = {location}")]
    NotSelfMap { modulus: f64, location: String },

    #[error("unknown label `{label}`; known labels: {known}")]
    UnknownLabel { label: String, known: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("zero norm: {0}")]
    ZeroNorm(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;

impl LabError {
    pub(crate) fn non_finite(location: impl Into<String>) -> Self {
        LabError::NonFinite {
            location: location.into(),
        }
    }

    /// True for errors caused by bad user input rather than numerical failure.
    pub fn is_domain_error(&self) -> bool {
        matches!(
            self,
            LabError::Domain(_)
                | LabError::UnknownLabel { .. }
                | LabError::Precondition(_)
                | LabError::InvalidGenerator(_)
                | LabError::NotSelfMap { .. }
                | LabError::ZeroNorm(_)
        )
    }
}
