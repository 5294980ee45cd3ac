//! Exact computer algebra for deformation quantization on `R^n`.
//!
//! The crate provides, over the Gaussian rationals and with no floating
//! point anywhere:
//!
//! - truncated formal power series in the deformation parameter ħ
//!   ([`series::HbarSeries`]);
//! - multivariate polynomials as the desk-scale function algebra
//!   ([`poly::Polynomial`]);
//! - multivector fields with the wedge product and the Schouten-Nijenhuis
//!   bracket, Poisson bivectors and their calculus ([`polyvector`]);
//! - multidifferential operators with the Gerstenhaber product/bracket and
//!   the Hochschild differential ([`multidiff`]);
//! - star products: Moyal construction, associativity and Maurer-Cartan
//!   residuals, first-order skew extraction, equivalence transforms
//!   ([`star`]);
//! - formal Poisson structures, the Baker-Campbell-Hausdorff product and
//!   the gauge action of both differential graded Lie algebras ([`gauge`]);
//! - the Hochschild-Kostant-Rosenberg map with chain-map and bracket
//!   compatibility checks ([`formality`]);
//! - a text grammar with parser and canonical printer ([`parse`]) and the
//!   `dq` command-line front end ([`cli`]).
//!
//! Start with the runnable examples in `examples/` — there is one per major
//! capability.

pub mod error;
pub mod scalar;
pub mod series;
pub mod poly;
pub mod polyvector;
pub mod multidiff;
pub mod star;
pub mod gauge;
pub mod formality;
pub mod parse;
pub mod cli;

pub use error::{DqError, Result};
pub use gauge::{FormalBivector, FormalVectorField};
pub use multidiff::MultiDiffOp;
pub use poly::Polynomial;
pub use polyvector::{CovectorField, PolyVector};
pub use scalar::{GaussianRational, Rational};
pub use series::{Coeff, HbarSeries};
pub use star::{EquivalenceOp, FormalFunction, StarProduct};
