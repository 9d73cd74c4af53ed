//! Truncated power series in `t`, Laurent series in `t`, and polynomials /
//! finite Laurent expansions in `ε` whose coefficients are truncated series.

mod eps;
pub mod io;
mod laurent;
mod trunc;

pub use eps::{eps_split, EpsLaurent, EpsPoly};
pub use laurent::LaurentSeries;
pub use trunc::{series_exp, series_inv, series_log, series_sqrt, TruncSeries};
