//! Independent routes to the monodromy exponent: the Heun continued
//! fraction, the elliptic closed form, and direct numerical integration.

mod elliptic;
mod heun;
mod numeric;

pub use elliptic::lambda_elliptic;
pub use heun::{lambda_heun, lambda_heun_series, CfEquation};

pub use numeric::{monodromy_numeric, MonodromyResult};
