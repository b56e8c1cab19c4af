//! Calculus on the minimal Z₂×Z₂-superspace with coordinates
//! `x (0,0)`, `ξ (0,1)`, `η (1,0)` and the exotic `z (1,1)`.
//!
//! Functions are graded series in `z` with nilpotent `ξ`, `η`; the crate
//! computes Berezinians of general coordinate changes, evaluates three
//! candidate integrals and checks whether each is invariant under coordinate
//! changes.

pub mod error;
pub mod expr;
pub mod graded;
pub mod superfn;
pub mod transform;
pub mod berezinian;
pub mod integrate;
pub mod numeric;

pub use error::{Error, Result};
pub use expr::{Base, BindingEnv, Expr};
pub use graded::{monomial_mul, sign, Degree, Monomial, Product};
