//! Exact symbolic verification of the conformal covariance of powers of the
//! Laplacian, and of the factorized sphere operator `prod (Delta_S - c_j)`
//! obtained from them by stereographic projection.
//!
//! Layers, bottom up:
//!
//! * [`exactfn`]: exact polynomials, rational functions and one radical.
//! * [`diffop`]: linear differential operators in normal form `sum a_alpha d^alpha`.
//! * [`flat`]: identities on `R^n` (the flat product identity, commutators,
//!   conformal covariance of `Delta^k`).
//! * [`sphere`]: calculus on `S^n` modulo `|x|^2 - 1`, stereographic pullback,
//!   the intertwining identities and the spectrum check.
//! * [`numcheck`]: floating-point sampling and finite-difference shadows.
//! * [`properties`]: seeded randomized algebraic property suites.
//! * [`report`]: the structured result type shared by every verifier.

pub mod diffop;
pub mod error;
pub mod exactfn;
pub mod flat;
pub mod numcheck;
pub mod options;
pub mod properties;
pub mod report;
pub mod sphere;

pub use error::{Error, Result};
pub use exactfn::{FnElem, Polynomial, RadicalElement, Rational, RationalFunction};
pub use options::{RadicalMode, VerifyOptions};
pub use report::{CaseStatus, Report};

/// Version string embedded in serialized reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
