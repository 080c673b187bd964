use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("denominator `{which}` vanishes (|value| = {magnitude:e}); parameters sit on an EIT pole")]
    EitPole { which: &'static str, magnitude: f64 },

    #[error("singular steady-state system at these parameters")]
    SingularSystem,

    #[error("step size underflow at t = {time:e} s (h = {step:e} s); system too stiff for the explicit integrator")]
    StepUnderflow { time: f64, step: f64 },

    #[error("susceptibility fit is ill-conditioned: relative residual {residual:e} exceeds {limit:e}")]
    IllConditionedFit { residual: f64, limit: f64 },

    #[error("intensity grid needs at least {needed} points, got {got}")]
    GridTooSmall { needed: usize, got: usize },

    #[error("group velocity of the {field} field is unbounded")]
    UnboundedVelocity { field: &'static str },

    #[error("spectrum of rho*rho_tilde is not real: eigenvalue {re:e} + {im:e}i")]
    ComplexSpectrum { re: f64, im: f64 },

    #[error("spectrum of rho*rho_tilde has a negative eigenvalue {0:e}")]
    NegativeSpectrum(f64),

    #[error("phase table is incomplete: {0}")]
    IncompleteTable(String),

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("velocity matching needs at least two free parameters, got {0}")]
    TooFewFreeParameters(usize),

    #[error("target phase {target} rad is not reachable (phase saturates near {reached} rad)")]
    PhaseUnreachable { target: f64, reached: f64 },
}

impl Error {
    /// Errors caused by the supplied parameters or inputs, as opposed to a
    /// numerical breakdown at otherwise valid parameters.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::GridTooSmall { .. }
                | Error::IncompleteTable(_)
                | Error::NotNormalized(_)
                | Error::TooFewFreeParameters(_)
        )
    }
}
