use num_bigint::BigInt;
use num_traits::One;

use crate::rings::Rational;
use crate::series::TruncSeries;

/// `Σ_k binom(2k, k)² / 16^k · t^k` through `t^{K-1}`, built from the
/// term ratio `((2k-1)/(2k))²`.
pub fn lambda_elliptic(order: usize) -> TruncSeries {
    let mut coeffs = Vec::with_capacity(order);
    let mut c = Rational::one();
    for k in 0..order {
        if k > 0 {
            let r = Rational::new(BigInt::from(2 * k - 1), BigInt::from(2 * k));
            c = c * &r * &r;
        }
        coeffs.push(c.clone());
    }
    TruncSeries::new(coeffs)
}
