//! Exact q-series engine for theta-function product identities.
//!
//! Theta functions are evaluated as truncated power series with exact
//! integer coefficients. Lattice sums of extended quadratic forms are split
//! along integer-matrix exact covering systems into theta-product
//! combinations, and identities are checked coefficient by coefficient.

pub mod cli;
pub mod corpus;
pub mod ecs;
pub mod error;
pub mod expand;
pub mod expr;
pub mod quadform;
pub mod series;

pub use error::{Error, Result};
pub use expr::{eval, parse, MonomialArg, ThetaExpr};
pub use series::QSeries;
