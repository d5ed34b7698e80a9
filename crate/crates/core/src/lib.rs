//! Exact symbolic engine for Poisson structures on coordinate charts.
//!
//! Coefficients are [`expr::ScalarExpr`] normal forms; tensors are sparse
//! component maps over a [`chart::ChartSpec`]. On top of the exterior
//! calculus sit Jacobi and Casimir checks, coupling data near a leaf, and
//! first approximations of Casimir-weighted products.

pub mod chart;
pub mod check;
pub mod corpus;
pub mod coupling;
pub mod error;
pub mod expr;
pub mod linalg;
pub mod multivec;
pub mod oracles;
pub mod poisson;
pub mod random;
pub mod vorobjev;

pub use chart::ChartSpec;
pub use check::{Check, Regime, Witness};
pub use error::{Error, Result};
pub use expr::{ExprTree, Rational, ScalarExpr, Value, ZeroTest, ZeroVerdict};
pub use multivec::{DifferentialForm, MultivectorField};
