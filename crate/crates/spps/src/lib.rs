//! Command-line front end for [`spps_core`].
//!
//! Problem files are flat `key = value` documents (or the equivalent JSON
//! object) describing a perturbed Bessel spectral problem and the solver
//! settings. The `spps` binary solves them, runs the built-in benchmarks and
//! dumps formal powers and transmutation images as CSV.

pub mod cli;
pub mod commands;
pub mod file;
pub mod format;

use spps_core::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const FAILURE: u8 = 1;
    pub const PARSE: u8 = 2;
    pub const VALIDATE: u8 = 3;
    pub const U0: u8 = 4;
    pub const NONCONVERGENCE: u8 = 5;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Core(#[from] Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Bench(String),
}

impl CliError {
    pub fn parse(message: impl Into<String>) -> Self {
        CliError::Parse(message.into())
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        use spps_core::expr::ExprError;
        match self {
            CliError::Parse(_) => exit::PARSE,
            CliError::Core(e) => match e {
                Error::Expr(ExprError::Syntax { .. } | ExprError::UnknownIdentifier { .. }) => exit::PARSE,
                Error::Expr(ExprError::Domain { .. }) | Error::Validation { .. } | Error::Grid(_) => exit::VALIDATE,
                Error::ParticularSolution(_) | Error::SeriesTail { .. } => exit::U0,
                Error::Nonconvergence(_) | Error::BoundViolation { .. } => exit::NONCONVERGENCE,
                Error::Unsupported(_) => exit::FAILURE,
            },
            CliError::Io { .. } | CliError::Bench(_) => exit::FAILURE,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_exit_codes() {
        let code = |e: Error| CliError::from(e).exit_code();
        assert_eq!(CliError::parse("x").exit_code(), exit::PARSE);
        assert_eq!(
            code(Error::Validation {
                field: "l",
                message: String::new()
            }),
            exit::VALIDATE
        );
        assert_eq!(code(Error::ParticularSolution(String::new())), exit::U0);
        assert_eq!(code(Error::SeriesTail { tail: 1.0 }), exit::U0);
        assert_eq!(code(Error::Nonconvergence(String::new())), exit::NONCONVERGENCE);
        assert_eq!(
            code(Error::BoundViolation {
                order: 1,
                x: 0.5,
                value: 2.0,
                bound: 1.0
            }),
            exit::NONCONVERGENCE
        );
        assert_eq!(CliError::Bench(String::new()).exit_code(), exit::FAILURE);
    }
}
