use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::Rational;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Element of the prime field Z/pZ. The modulus travels with the value;
/// combining elements of different moduli panics.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u64,
    modulus: u64,
}

impl Fp {
    pub fn new(value: i64, modulus: u64) -> Self {
        debug_assert!(modulus >= 2);
        let m = modulus as i128;
        Fp {
            value: (value as i128).rem_euclid(m) as u64,
            modulus,
        }
    }

    pub fn zero(modulus: u64) -> Self {
        Fp { value: 0, modulus }
    }

    pub fn one(modulus: u64) -> Self {
        Fp { value: 1 % modulus, modulus }
    }

    pub fn from_bigint(n: &BigInt, modulus: u64) -> Self {
        let r = n.mod_floor(&BigInt::from(modulus));
        Fp {
            value: r.to_u64().expect("reduced residue fits"),
            modulus,
        }
    }

    /// Reduction of a rational whose denominator is prime to the modulus.
    pub fn from_rational(q: &Rational, modulus: u64) -> Option<Self> {
        let den = Fp::from_bigint(q.denom(), modulus);
        if den.value == 0 {
            return None;
        }
        Some(Fp::from_bigint(q.numer(), modulus) * den.inv()?)
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = *self;
        let mut acc = Fp::one(self.modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.value == 0 {
            return None;
        }
        let (g, x, _) = ext_gcd(self.value as i128, self.modulus as i128);
        if g != 1 {
            return None;
        }
        Some(Fp::new(
            x.rem_euclid(self.modulus as i128) as i64,
            self.modulus,
        ))
    }

    /// Symmetric representative in (-p/2, p/2].
    pub fn signed(&self) -> i64 {
        let v = self.value as i64;
        let p = self.modulus as i64;
        if v > p / 2 {
            v - p
        } else {
            v
        }
    }

    fn check(&self, other: &Fp) {
        assert_eq!(
            self.modulus, other.modulus,
            "combining elements of different prime fields"
        );
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, o: Fp) -> Fp {
        self.check(&o);
        let s = self.value as u128 + o.value as u128;
        Fp {
            value: (s % self.modulus as u128) as u64,
            modulus: self.modulus,
        }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, o: Fp) -> Fp {
        self.check(&o);
        let s = self.value as u128 + self.modulus as u128 - o.value as u128;
        Fp {
            value: (s % self.modulus as u128) as u64,
            modulus: self.modulus,
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, o: Fp) -> Fp {
        self.check(&o);
        let s = self.value as u128 * o.value as u128;
        Fp {
            value: (s % self.modulus as u128) as u64,
            modulus: self.modulus,
        }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp {
            value: (self.modulus - self.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

impl<'a> Add<&'a Fp> for &'a Fp {
    type Output = Fp;
    fn add(self, o: &Fp) -> Fp {
        *self + *o
    }
}

impl<'a> Sub<&'a Fp> for &'a Fp {
    type Output = Fp;
    fn sub(self, o: &Fp) -> Fp {
        *self - *o
    }
}

impl<'a> Mul<&'a Fp> for &'a Fp {
    type Output = Fp;
    fn mul(self, o: &Fp) -> Fp {
        *self * *o
    }
}

impl Neg for &Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        -*self
    }
}

crate::rings::ring_via_ops!(
    Fp,
    zero = |x| Fp::zero(x.modulus),
    one = |x| Fp::one(x.modulus),
    is_zero = |x| x.value == 0
);

/// `true` when `p` divides the (reduced) denominator of `q`.
pub(crate) fn divides_denominator(q: &Rational, p: u64) -> bool {
    let d = q.denom().abs();
    !d.is_zero() && (d % BigInt::from(p)).is_zero()
}
