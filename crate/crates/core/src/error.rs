use thiserror::Error;

/// Failures raised by the physics routines.
///
/// Variants are grouped by how a caller should react: configuration problems,
/// points outside a formula's domain, and integrator convergence failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("resonance: |{what}| = {detuning:e} is inside the guard {guard:e}")]
    Resonance {
        what: &'static str,
        detuning: f64,
        guard: f64,
    },

    #[error("alpha(t) vanishes at t = {t}: |sin(omega t)| = {sin:e}, so |beta/alpha|^2 is undefined")]
    SingularAlpha { t: f64, sin: f64 },

    #[error("lambda1 must be nonzero for the closed-form susceptibility")]
    ZeroLambda1,

    #[error("state norm <psi|psi> = {norm:e} is below the guard")]
    DegenerateNorm { norm: f64 },

    #[error("step-halving error estimate {est_error:e} exceeds {limit:e} at step {step:e}; refine the step")]
    StepTooLarge {
        est_error: f64,
        limit: f64,
        step: f64,
    },

    #[error("spectral line at frequency {frequency:e} is too close to zero")]
    ZeroFrequencyLine { frequency: f64 },

    #[error("need at least {need} samples on each side of omega = 0, got {have}")]
    InsufficientSamples { have: usize, need: usize },
}

impl Error {
    /// True for errors that mark a point outside a formula's domain.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Resonance { .. }
                | Error::SingularAlpha { .. }
                | Error::ZeroLambda1
                | Error::DegenerateNorm { .. }
                | Error::ZeroFrequencyLine { .. }
                | Error::InsufficientSamples { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
