//! Exact and numeric calculus for higher spin Laplace operators on
//! polynomials `f(x, u)` with Clifford algebra coefficients.

pub mod cli;
pub mod clifford;
pub mod error;
pub mod integrate;
pub mod kernels;
pub mod linalg;
pub mod mvpoly;
pub mod operators;
pub mod poisson;
pub mod scalar;
pub mod spaces;
pub mod verify;

pub use clifford::{Blade, Multivector, VectorM};
pub use error::{Error, Result};
pub use mvpoly::{CPoly, Mono, Slot};
pub use scalar::{ExactScalar, Rational};
