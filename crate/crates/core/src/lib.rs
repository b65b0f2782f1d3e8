//! Spectral parameter power series (SPPS) for perturbed Bessel equations.
//!
//! Solves spectral problems of the form
//!
//! ```text
//! -u'' + (l(l+1)/x^2 + q(x)) u = lambda (r1(x) u' + r0(x) u),   x in (0, a],
//! beta u(a) + gamma u'(a) = 0,
//! ```
//!
//! where `u` is the solution regular at the origin (`u ~ x^(l+1)`). The regular
//! solution is written as a power series in the spectral parameter whose
//! coefficients are recursive integrals ("formal powers") of a nonvanishing
//! particular solution. Truncating the series turns the characteristic
//! function into a polynomial whose roots approximate the eigenvalues.
//!
//! The crate is `no_std` and only needs `alloc`. IO, file formats and the
//! command line live in the companion `spps` crate.
//!
//! ```
//! use spps_core::prelude::*;
//!
//! // -u'' + (5/16)/x^2 u = lambda u on (0, 1], u(1) = 0
//! let problem = ProblemSpec::new(0.25, 1.0).with_alpha(0.0);
//! let settings = Settings {
//!     n: 20,
//!     m: 2000,
//!     num_eigenvalues: 2,
//!     u0: U0Choice::Analytic {
//!         u0: Expr::parse("x^(5/4)").unwrap(),
//!         du0: Expr::parse("5/4*x^(1/4)").unwrap(),
//!     },
//!     ..Settings::default()
//! };
//! let result = solve(&problem, &settings).unwrap();
//! assert!((result.eigenvalues[0].lambda.re - 12.1871394680951).abs() < 1e-6);
//! ```

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bench;
mod error;
pub mod expr;
pub mod grid;
pub mod powers;
pub mod problem;
pub mod spectrum;
pub mod spps;
pub mod usol;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub mod prelude {
    pub use crate::expr::Expr;
    pub use crate::grid::{Grid, GridFunction};
    pub use crate::powers::{FormalPowerSet, PowerKind, PowerOptions};
    pub use crate::problem::{ProblemSpec, SampledProblem};
    pub use crate::spectrum::{solve, CharPoly, EigenResult, Eigenvalue, Settings, Strategy, TailModel, U0Choice};
    pub use crate::spps::SppsSolution;
    pub use crate::usol::ParticularSolution;
    pub use crate::{Complex64, Error, Result};
}
