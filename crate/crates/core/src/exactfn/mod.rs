//! Exact arithmetic on multivariate polynomials, rational functions and a
//! single quadratic radical extension, with partial derivatives and evaluation.
//!
//! No floating point is used here except in the explicit `eval_f64` helpers
//! that feed the numeric cross-checks.

mod elem;
mod parse;
mod poly;
mod radical;
mod ratfn;

pub use elem::{ring_op, FnElem, RingOp};
pub use parse::parse_polynomial;
pub use poly::{monomials_up_to, Monomial, Polynomial};
pub use radical::{RadicalBase, RadicalElement};
pub use ratfn::RationalFunction;

pub(crate) use ratfn::rational_powi;

/// Arbitrary-precision rational; always reduced with a positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}
