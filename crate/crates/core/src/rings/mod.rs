//! Exact scalar rings: rationals, prime fields, and dense univariate
//! polynomials over both.

mod bareiss;
mod fp;
mod poly;
mod rational;

use std::fmt::Debug;

pub use bareiss::poly_bareiss_det;
pub use fp::{is_prime, Fp};
pub use poly::{PolyFp, PolyQ, RatFunc, RatFuncRepr};
pub use rational::{format_rational, parse_rational, rat, Rational};

/// A commutative ring whose elements know their own shape (modulus,
/// truncation order, ...), so zero and one are produced from an existing
/// element.
pub trait Ring: Clone + PartialEq + Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
}

/// Implements [`Ring`] for a type whose references already support the
/// arithmetic operators.
macro_rules! ring_via_ops {
    ($ty:ty, zero = |$z:ident| $zero:expr, one = |$o:ident| $one:expr, is_zero = |$iz:ident| $is_zero:expr) => {
        impl $crate::rings::Ring for $ty {
            fn zero_like(&self) -> Self {
                let $z = self;
                $zero
            }
            fn one_like(&self) -> Self {
                let $o = self;
                $one
            }
            fn is_zero(&self) -> bool {
                let $iz = self;
                $is_zero
            }
            fn add_ref(&self, other: &Self) -> Self {
                self + other
            }
            fn sub_ref(&self, other: &Self) -> Self {
                self - other
            }
            fn mul_ref(&self, other: &Self) -> Self {
                self * other
            }
            fn neg_ref(&self) -> Self {
                -self
            }
        }
    };
}
pub(crate) use ring_via_ops;

ring_via_ops!(
    Rational,
    zero = |_q| Rational::from_integer(0.into()),
    one = |_q| Rational::from_integer(1.into()),
    is_zero = |q| num_traits::Zero::is_zero(q)
);
