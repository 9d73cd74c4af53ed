//! The regularized determinant: stabilization of the Weierstrass polynomial
//! of growing window determinants, `L(D)`, and the independent route through
//! traces and the `T_ε` projection.

mod stabilize;
mod teps;
mod trace;

pub use stabilize::{ldet, ldet_with, regularized_wpoly, regularized_wpoly_with, Ldet, StabilizationReport};
pub use teps::{t_eps, RationalFunctionEps};
pub use trace::{w_via_trace, w_via_trace_at};
