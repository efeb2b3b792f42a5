use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A bosonic ratio |γ_B|² outside [0, 1): the entropy diverges or is undefined.
    #[error("bosonic |gamma|^2 = exp({log_value}) is not below 1")]
    BosonRatioOutOfRange { log_value: f64 },

    #[error("step size underflow at eta = {eta} (h = {step}); the mode equation is too stiff")]
    StepSizeUnderflow { eta: f64, step: f64 },

    #[error("integration exceeded {max_steps} steps")]
    TooManySteps { max_steps: usize },

    #[error("out-region plane-wave basis is ill-conditioned (omega_out = {omega_out})")]
    IllConditionedBasis { omega_out: f64 },

    #[error("entropy is flat: peak {peak:e} below 1e-12")]
    FlatEntropy { peak: f64 },

    #[error("optimal-mode certificate violated at k = {k_star}")]
    CertificateViolated { k_star: f64 },

    #[error("bracket failure: target {target} outside [{lo_value}, {hi_value}]")]
    BracketFailure {
        target: f64,
        lo_value: f64,
        hi_value: f64,
    },

    #[error("monotonicity check failed: {what}")]
    NotMonotone { what: String },

    #[error("upper bracket exhausted: entropy {target} not reached by epsilon = {epsilon_max:e}")]
    UpperBracketExhausted { target: f64, epsilon_max: f64 },
}

impl Error {
    /// Short machine-readable name of the failure kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid-parameter",
            Error::BosonRatioOutOfRange { .. } => "boson-ratio-out-of-range",
            Error::StepSizeUnderflow { .. } => "step-size-underflow",
            Error::TooManySteps { .. } => "too-many-steps",
            Error::IllConditionedBasis { .. } => "ill-conditioned-basis",
            Error::FlatEntropy { .. } => "flat-entropy",
            Error::CertificateViolated { .. } => "certificate-violated",
            Error::BracketFailure { .. } => "bracket-failure",
            Error::NotMonotone { .. } => "not-monotone",
            Error::UpperBracketExhausted { .. } => "upper-bracket-exhausted",
        }
    }
}
