use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("matrix is not a rotation (orthonormality defect {ortho:e}, det {det})")]
    NotARotation { ortho: f64, det: f64 },

    #[error("invalid gain `{name}`: {reason}")]
    InvalidGain { name: &'static str, reason: String },

    #[error("reference vectors are collinear or zero (|a x b| = {cross_norm:e})")]
    DegenerateReferences { cross_norm: f64 },

    #[error("no Lyapunov certificate: {0}")]
    NoCertificate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite observer state at sample {index}")]
    Diverged { index: usize },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
