use thiserror::Error;

use crate::homoclinic::Branch;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("polar angle undefined at the origin")]
    DegenerateAngle,

    #[error("radius too small for the angular equation (rho = {rho:e})")]
    SingularRho { rho: f64 },

    #[error("degenerate parameters: |J - B sin(gamma)| = {value:e} is below the elimination threshold")]
    DegenerateParameters { value: f64 },

    #[error("A = B = J = 0: the circle rho = 2/(3C) and the origin form a continuum of equilibria")]
    ContinuumOfEquilibria,

    #[error("arccos argument {arg} is outside [-1, 1]: fewer than three real equilibria")]
    ArccosDomain { arg: f64 },

    #[error("cannot classify equilibrium: |det J| = {det:e} is below threshold")]
    DegenerateClassification { det: f64 },

    #[error("Newton polish did not converge (residual {residual:e})")]
    NewtonFailed { residual: f64 },

    #[error("no saddle equilibrium for these parameters")]
    NoSaddle,

    #[error("saddle realises the +sqrt(D) branch, which the closed-form construction does not cover")]
    PositiveSignSaddle,

    #[error("no homoclinic orbit{}: {reason}", branch.map(|b| format!(" on the {b} branch")).unwrap_or_default())]
    Nonexistence { branch: Option<Branch>, reason: String },

    #[error("literal phase formula is undefined: {0}")]
    LiteralFormDomain(&'static str),

    #[error("integrator exceeded {steps} steps")]
    StepLimit { steps: usize },

    #[error("integrator step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
}
