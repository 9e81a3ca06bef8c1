//! Numerical laboratory for analytic Morrey spaces `H^{2,λ}` on the unit disc
//! and for semigroups of holomorphic self-maps acting on them by composition.

// `!(x < y)` is used on purpose so that NaN fails range checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod disc;
pub mod error;
pub mod function;
pub mod probe;
pub mod quadrature;
pub mod semigroup;
pub mod seminorms;
pub mod verify;

pub use error::{LabError, Result};
