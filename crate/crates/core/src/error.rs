use alloc::string::String;

use crate::expr::ExprError;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),

    #[error("invalid problem: {field}: {message}")]
    Validation { field: &'static str, message: String },

    #[error("grid: {0}")]
    Grid(String),

    #[error("particular solution: {0}")]
    ParticularSolution(String),

    #[error("formal power bound violated at n = {order}, x = {x}: |value| = {value:e} > bound {bound:e}")]
    BoundViolation {
        order: usize,
        x: f64,
        value: f64,
        bound: f64,
    },

    #[error("series tail {tail:e} exceeds tolerance at x = a; increase N")]
    SeriesTail { tail: f64 },

    #[error("root finder did not converge: {0}")]
    Nonconvergence(String),

    #[error("{0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn validation(field: &'static str, message: impl Into<String>) -> Self {
        Error::Validation {
            field,
            message: message.into(),
        }
    }
}
