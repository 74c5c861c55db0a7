use core::fmt;

/// Failures reported by the simulation engines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates its documented domain.
    InvalidParameter { name: &'static str, reason: &'static str },
    /// Time lies outside the range covered by a tabulated sweep.
    OutOfDomain { t: f64, start: f64, end: f64 },
    /// The operation has a closed form only for a constant drive frequency.
    UnsupportedProfile,
    /// Adaptive integration could not make progress.
    StepUnderflow { t: f64, step: f64 },
    /// Landau-Zener window edges are too close to the resonance.
    WindowTooNarrow { required_detuning: f64, actual_detuning: f64 },
    /// Fock cutoff too small to hold the requested state within the truncation budget.
    CutoffTooSmall { required: usize, actual: usize },
    /// A number-statistics quantity that needs a nonzero mean population.
    UndefinedStatistic,
    /// State norm drifted during propagation.
    NormDrift { norm: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, reason } => write!(f, "invalid parameter `{name}`: {reason}"),
            Error::OutOfDomain { t, start, end } => {
                write!(f, "time {t} outside sweep domain [{start}, {end}]")
            }
            Error::UnsupportedProfile => {
                write!(f, "closed form requires a constant sweep; use the ODE engines instead")
            }
            Error::StepUnderflow { t, step } => {
                write!(f, "integration step underflow at t = {t} (step {step:e})")
            }
            Error::WindowTooNarrow { required_detuning, actual_detuning } => {
                write!(f, "window too narrow: edge detuning {actual_detuning} below required {required_detuning}")
            }
            Error::CutoffTooSmall { required, actual } => {
                write!(f, "Fock cutoff {actual} too small, need at least {required}")
            }
            Error::UndefinedStatistic => write!(f, "statistic undefined for zero mean population"),
            Error::NormDrift { norm } => write!(f, "state norm drifted to {norm}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: &'static str) -> Error {
    Error::InvalidParameter { name, reason }
}
