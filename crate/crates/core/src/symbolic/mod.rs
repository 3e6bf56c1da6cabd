//! Exact commutative algebra over the rationals: linear forms, polynomials
//! and rational functions whose denominators split into linear factors.

pub mod eval;
pub mod linear;
pub mod poly;
pub mod rational;
pub mod variable;

use thiserror::Error;

pub use eval::random_eval;
pub use linear::LinearForm;
pub use poly::{Monomial, Poly};
pub use rational::{rf_equal, RationalFunction};
pub use variable::{q, qr, SeriesVar, Variable, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolicError {
    #[error("substitution sends the denominator factor ({0}) to zero")]
    SubstitutionDegenerate(String),
    #[error("division by the zero linear form")]
    ZeroDenominator,
    #[error("cannot invert a function whose numerator is not a constant")]
    NotInvertible,
}
