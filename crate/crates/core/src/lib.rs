//! Contact-set machinery and eigenvalue-bound verification for elliptic operators.

pub mod bounds;
pub mod contact;
pub mod emit;
pub mod eigensolve;
pub mod error;
pub mod expr;
pub mod fields;
pub mod geometry;
pub mod linalg;
pub mod operators;
pub mod scenario;
pub mod semilinear;

pub use error::{Error, Result};
