use thiserror::Error;

/// Errors raised by the numerical pipeline.
///
/// [`Error::name`] gives a stable identifier for each variant; the CLI writes
/// it into its diagnostics file.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid function: {0}")]
    InvalidFunction(String),
    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),
    #[error("unknown coordinate frame `{0}`")]
    FrameError(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
    #[error("non-finite state at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("no section crossing before t = {max_time}")]
    NoCrossing { max_time: f64 },

    #[error("singular shooting: return-map derivative {derivative} is numerically 1 (orbit not isolated)")]
    SingularShooting { derivative: f64 },
    #[error("no return to the section within t = {max_time}")]
    NoReturn { max_time: f64 },
    #[error("shooting did not converge in {iterations} Newton steps")]
    Diverged { iterations: usize },
    #[error("orbit leaves the disk of radius {r} (max radius {max_radius})")]
    OrbitOutsideS { r: f64, max_radius: f64 },

    #[error("numerical multipliers {numerical:?} disagree with expected {expected:?}")]
    MultiplierMismatch { numerical: [f64; 2], expected: [f64; 2] },
    #[error("1 is not a simple multiplier: |1 - rho2| = {gap}")]
    SimpleMultiplierViolation { gap: f64 },
    #[error("degenerate amplitude: |g(a)| = {value}")]
    DegenerateAmplitude { value: f64 },

    #[error("perturbed Newton iteration did not converge in {iterations} steps")]
    NewtonDiverged { iterations: usize },
    #[error("perturbed Newton Jacobian is singular (condition {condition:e})")]
    SingularJacobian { condition: f64 },

    #[error("forcing is not periodic with the orbit period (mismatch {mismatch:e})")]
    NonPeriodicForcing { mismatch: f64 },

    #[error("Lyapunov function increased by {upstep:e} at t = {t}")]
    MonotonicityViolation { upstep: f64, t: f64 },

    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidFunction(_) => "InvalidFunction",
            Error::InvalidPerturbation(_) => "InvalidPerturbation",
            Error::FrameError(_) => "FrameError",
            Error::InvalidInput(_) => "InvalidInput",
            Error::StepSizeUnderflow { .. } => "StepSizeUnderflow",
            Error::NonFiniteState { .. } => "NonFiniteState",
            Error::NoCrossing { .. } => "NoCrossing",
            Error::SingularShooting { .. } => "SingularShooting",
            Error::NoReturn { .. } => "NoReturn",
            Error::Diverged { .. } => "Diverged",
            Error::OrbitOutsideS { .. } => "OrbitOutsideS",
            Error::MultiplierMismatch { .. } => "MultiplierMismatch",
            Error::SimpleMultiplierViolation { .. } => "SimpleMultiplierViolation",
            Error::DegenerateAmplitude { .. } => "DegenerateAmplitude",
            Error::NewtonDiverged { .. } => "NewtonDiverged",
            Error::SingularJacobian { .. } => "SingularJacobian",
            Error::NonPeriodicForcing { .. } => "NonPeriodicForcing",
            Error::MonotonicityViolation { .. } => "MonotonicityViolation",
            Error::Config(_) => "Config",
            Error::Io(_) => "Io",
        }
    }

    /// Validation errors (bad input, unusable paths) as opposed to
    /// numerical failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidFunction(_)
                | Error::InvalidPerturbation(_)
                | Error::FrameError(_)
                | Error::InvalidInput(_)
                | Error::Config(_)
                | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
