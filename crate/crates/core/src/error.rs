use thiserror::Error;

use crate::expr::ExprError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("basis-overflow: term `{term}` lies outside the ansatz span; {advice}")]
    BasisOverflow { term: String, advice: String },
    #[error("higher-order-lagrangian: no first-integral formula for perturbations depending on upp")]
    HigherOrderLagrangian,
    #[error("higher-order-equation: the Euler-Lagrange equation is of order above two")]
    HigherOrderEquation,
    #[error("not-a-symmetry: residual at order {order} is `{residual}`")]
    NotASymmetry { order: usize, residual: String },
    #[error("missing generator or gauge component at order {0}")]
    MissingOrder(usize),
    #[error("singularity guard: {0}")]
    Singularity(String),
    #[error("verification refused: {0}")]
    Refused(String),
}

pub type Result<T> = std::result::Result<T, Error>;
