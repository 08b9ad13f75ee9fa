use thiserror::Error;

/// Failures raised by the numerical modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum WaveError {
    #[error("non-finite value in {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("chord-arc violation: C1 = {c1:.3e}, C2 = {c2:.3e}, floor = {floor:.3e}")]
    ChordArc { c1: f64, c2: f64, floor: f64 },

    #[error("evaluation point {index} is {distance:.3e} from the interface (floor {floor:.3e})")]
    NearBoundary { index: usize, distance: f64, floor: f64 },

    #[error("vortex separation {d_p:.3e} below collision floor {floor:.3e}")]
    Collision { d_p: f64, floor: f64 },

    #[error("second-kind system is numerically singular (pivot ratio {pivot_ratio:.3e})")]
    SingularSystem { pivot_ratio: f64 },

    #[error("fixed-point iteration stalled after {iterations} iterations (update {update:.3e})")]
    NoConvergence { iterations: usize, update: f64 },

    #[error("Taylor sign condition failed: margin {margin:.6e}")]
    TaylorFailed { margin: f64 },
}

pub type Result<T> = std::result::Result<T, WaveError>;

pub(crate) fn check_finite(what: &'static str, values: &[num_complex::Complex64]) -> Result<()> {
    for (index, v) in values.iter().enumerate() {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(WaveError::NonFinite { what, index });
        }
    }
    Ok(())
}
