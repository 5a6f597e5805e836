use thiserror::Error;

pub type Result<T, E = DqdError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DqdError {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("orbital overlap s = {overlap} is not strictly inside (-1, 1); the basis is degenerate")]
    DegenerateBasis { overlap: f64 },

    #[error("index {index} out of range (expected 0 or 1)")]
    IndexOutOfRange { index: usize },

    #[error("exchange target {target_ghz} GHz outside the reachable range [{lo_ghz}, {hi_ghz}] GHz")]
    TargetOutOfRange {
        target_ghz: f64,
        lo_ghz: f64,
        hi_ghz: f64,
    },

    #[error("root finder did not converge after {iterations} iterations (|f| = {residual})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("detuning |ε| = {epsilon} meV reaches the ΔU = {delta_u} meV pole of the Hubbard estimate")]
    OutsideHubbardValidity { epsilon: f64, delta_u: f64 },

    #[error("all noise channels are zero; the quality factor is infinite")]
    InfiniteQuality,

    #[error("barrier-control relative noise is zero; the improvement factor is infinite")]
    InfiniteImprovement,

    #[error("quadrature error estimate {estimate:e} exceeds requested tolerance {tolerance:e}")]
    QuadratureTolerance { estimate: f64, tolerance: f64 },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
}

impl DqdError {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        DqdError::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}
