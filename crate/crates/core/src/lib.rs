//! Exact p-determinants of differential operators, their regularized lifts
//! through formal Weierstrass preparation, and the monodromy-exponent series
//! they are compared against.

pub mod diffop;
pub mod error;
pub mod linalg;
pub mod monodromy;
pub mod verify;
pub mod regdet;
pub mod rings;
pub mod series;
pub mod weierstrass;

pub use error::{Error, Result};
