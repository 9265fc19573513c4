use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma pole at x = {0}")]
    GammaPole(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error("derivative order {0} exceeds the cap of {cap}", cap = crate::expr::MAX_DERIVATIVE_ORDER)]
    DerivativeCap(u32),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("singular evaluation: {0}")]
    Singular(String),

    #[error("quadrature did not converge: estimated error {estimate:e} after {subdivisions} subdivisions")]
    Quadrature { estimate: f64, subdivisions: usize },

    #[error("integrator exceeded {0} steps")]
    MaxSteps(usize),

    #[error("step size underflow at t = {t}: h = {h:e}")]
    StepUnderflow { t: f64, h: f64 },
}
