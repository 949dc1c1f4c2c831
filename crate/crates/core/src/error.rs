use thiserror::Error;

/// Errors raised by the sensing-limit computations.
///
/// Scientific infeasibility of a speed-limit crossing is usually reported as
/// a value (see [`crate::qsl::Crossing`]); the `Infeasible` variant is only
/// used where an operation has no sensible value to return.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no information: {0}")]
    NoInformation(String),

    #[error("reference level {reference} lies above the ground energy {ground}")]
    InvalidReference { reference: f64, ground: f64 },

    #[error("time-ordered propagation did not converge after {depth} refinements (last change {change:e})")]
    NonConvergence { depth: u32, change: f64 },

    #[error("generator eigenvalues are degenerate at t = {t} (gap {gap:e})")]
    Degenerate { t: f64, gap: f64 },

    #[error("target not reached within the horizon: accumulated {accumulated}, needed {needed}")]
    Infeasible { accumulated: f64, needed: f64 },

    #[error("tensor dimension too large: {m} bodies (max {max})")]
    DimensionTooLarge { m: usize, max: usize },

    #[error("scaling law violated at m = {m}: {what} (brute force {brute}, closed form {closed})")]
    ScalingMismatch {
        m: usize,
        what: &'static str,
        brute: f64,
        closed: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
