use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("length mismatch: expected {expected} samples, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("multiplier `{tag}` is not finite at p = {p}")]
    NonFiniteMultiplier { tag: String, p: f64 },

    #[error("non-finite sample produced by {0}")]
    NonFinite(&'static str),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("packet shape does not fit the domain: {0}")]
    ShapeOutOfDomain(String),

    #[error("expected a {expected} packet, got {found}")]
    WrongYardstick { expected: &'static str, found: &'static str },

    #[error("density is not normalized (integral = {0})")]
    NotNormalized(f64),

    #[error("spectral overflow: {lost:.3e} of the spectral mass leaves the momentum window")]
    SpectralOverflow { lost: f64 },

    #[error("kernel matrix requested for n = {0}; at most 512 points are allowed")]
    KernelTooLarge(usize),

    #[error("initial packets overlap: {0:.3e} exceeds 1e-6")]
    Overlap(f64),

    #[error("cutoff instability: doubling p_max changes r_int by {0:.3e} (relative L2)")]
    CutoffInstability(f64),

    #[error("projection loss: coarse grid keeps only {kept:.6} of the packet norm")]
    ProjectionLoss { kept: f64 },

    #[error("fock basis too large: {0} modes (limit 48)")]
    BasisTooLarge(usize),
}

impl Error {
    /// True for numerical guards (as opposed to caller or configuration
    /// mistakes). The CLI maps these to exit code 3.
    pub fn is_numerical_guard(&self) -> bool {
        matches!(
            self,
            Error::NonFinite(_)
                | Error::NonFiniteMultiplier { .. }
                | Error::SpectralOverflow { .. }
                | Error::CutoffInstability(_)
                | Error::ProjectionLoss { .. }
                | Error::NotNormalized(_)
        )
    }
}
