use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::fp::divides_denominator;
use super::{Fp, Rational};

/// Dense univariate polynomial in `t` with rational coefficients, lowest
/// degree first. The trailing coefficient is nonzero unless the polynomial
/// is zero (empty).
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct PolyQ {
    coeffs: Vec<Rational>,
}

impl PolyQ {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        PolyQ { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        PolyQ::new(c.iter().map(|&x| Rational::from_integer(x.into())).collect())
    }

    pub fn constant(c: Rational) -> Self {
        PolyQ::new(vec![c])
    }

    pub fn one() -> Self {
        PolyQ::constant(Rational::one())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + rational_to_f64(c))
    }

    /// Coefficient-wise reduction mod `p`; `None` when `p` divides some
    /// coefficient denominator.
    pub fn reduce(&self, p: u64) -> Option<PolyFp> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            if divides_denominator(c, p) {
                return None;
            }
            out.push(Fp::from_rational(c, p)?.value());
        }
        Some(PolyFp::new(p, out))
    }
}

pub(crate) fn rational_to_f64(q: &Rational) -> f64 {
    // Exact-enough for the numeric module: both parts are converted, then divided.
    let n = q.numer().to_f64().unwrap_or(f64::NAN);
    let d = q.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() {
        n / d
    } else {
        let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(900) as usize;
        let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
        let d = (q.denom() >> shift).to_f64().unwrap_or(1.0);
        n / d
    }
}

impl Add for &PolyQ {
    type Output = PolyQ;
    fn add(self, o: &PolyQ) -> PolyQ {
        let n = self.coeffs.len().max(o.coeffs.len());
        PolyQ::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &PolyQ {
    type Output = PolyQ;
    fn sub(self, o: &PolyQ) -> PolyQ {
        let n = self.coeffs.len().max(o.coeffs.len());
        PolyQ::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &PolyQ {
    type Output = PolyQ;
    fn mul(self, o: &PolyQ) -> PolyQ {
        if self.is_zero() || o.is_zero() {
            return PolyQ::default();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolyQ::new(out)
    }
}

impl Neg for &PolyQ {
    type Output = PolyQ;
    fn neg(self) -> PolyQ {
        PolyQ::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Dense polynomial over Z/pZ, lowest degree first, normalized.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyFp {
    modulus: u64,
    coeffs: Vec<u64>,
}

impl PolyFp {
    pub fn new(modulus: u64, coeffs: Vec<u64>) -> Self {
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % modulus).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        PolyFp { modulus, coeffs }
    }

    pub fn from_signed(modulus: u64, coeffs: &[i64]) -> Self {
        PolyFp::new(
            modulus,
            coeffs
                .iter()
                .map(|&c| Fp::new(c, modulus).value())
                .collect(),
        )
    }

    pub fn zero(modulus: u64) -> Self {
        PolyFp {
            modulus,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(c: Fp) -> Self {
        PolyFp::new(c.modulus(), vec![c.value()])
    }

    pub fn monomial(modulus: u64, degree: usize) -> Self {
        let mut c = vec![0; degree + 1];
        c[degree] = 1;
        PolyFp::new(modulus, c)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fp {
        Fp::new(
            self.coeffs.get(i).copied().unwrap_or(0) as i64,
            self.modulus,
        )
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn lead(&self) -> Fp {
        self.coeff(self.coeffs.len() - 1)
    }

    pub fn scale(&self, c: Fp) -> PolyFp {
        PolyFp::new(
            self.modulus,
            self.coeffs
                .iter()
                .map(|&x| (Fp::new(x as i64, self.modulus) * c).value())
                .collect(),
        )
    }

    pub fn pow(&self, mut e: u64) -> PolyFp {
        let mut base = self.clone();
        let mut acc = PolyFp::constant(Fp::one(self.modulus));
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Substitutes `t -> t^k`.
    pub fn inflate(&self, k: usize) -> PolyFp {
        let mut out = vec![0; self.coeffs.len().saturating_sub(1) * k + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i * k] = c;
        }
        PolyFp::new(self.modulus, out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &PolyFp) -> (PolyFp, PolyFp) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        assert_eq!(self.modulus, d.modulus);
        let p = self.modulus;
        let dd = d.coeffs.len() - 1;
        let inv = d.lead().inv().expect("nonzero leading coefficient");
        let mut rem: Vec<u64> = self.coeffs.clone();
        if rem.len() <= dd {
            return (PolyFp::zero(p), self.clone());
        }
        let mut quo = vec![0u64; rem.len() - dd];
        for k in (0..quo.len()).rev() {
            let c = Fp::new(rem[k + dd] as i64, p) * inv;
            quo[k] = c.value();
            if c.is_zero() {
                continue;
            }
            for (j, &dj) in d.coeffs.iter().enumerate() {
                let cur = Fp::new(rem[k + j] as i64, p) - c * Fp::new(dj as i64, p);
                rem[k + j] = cur.value();
            }
        }
        (PolyFp::new(p, quo), PolyFp::new(p, rem))
    }

    /// Exact quotient; `None` if the division leaves a remainder.
    pub fn div_exact(&self, d: &PolyFp) -> Option<PolyFp> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, other: &PolyFp) -> PolyFp {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            let inv = a.lead().inv().unwrap();
            a.scale(inv)
        }
    }

    /// Power-series coefficients of `self / den` through `t^(order-1)`.
    pub fn series_div(&self, den: &PolyFp, order: usize) -> Option<Vec<Fp>> {
        let p = self.modulus;
        let d0 = den.coeff(0).inv()?;
        let mut out: Vec<Fp> = Vec::with_capacity(order);
        for k in 0..order {
            let mut acc = self.coeff(k);
            for j in 1..=k {
                let dj = den.coeff(j);
                if !dj.is_zero() {
                    acc = acc - dj * out[k - j];
                }
            }
            out.push(acc * d0);
        }
        debug_assert!(out.iter().all(|c| c.modulus() == p));
        Some(out)
    }
}

impl Add for &PolyFp {
    type Output = PolyFp;
    fn add(self, o: &PolyFp) -> PolyFp {
        assert_eq!(self.modulus, o.modulus, "mixed moduli");
        let n = self.coeffs.len().max(o.coeffs.len());
        PolyFp::new(
            self.modulus,
            (0..n).map(|i| (self.coeff(i) + o.coeff(i)).value()).collect(),
        )
    }
}

impl Sub for &PolyFp {
    type Output = PolyFp;
    fn sub(self, o: &PolyFp) -> PolyFp {
        assert_eq!(self.modulus, o.modulus, "mixed moduli");
        let n = self.coeffs.len().max(o.coeffs.len());
        PolyFp::new(
            self.modulus,
            (0..n).map(|i| (self.coeff(i) - o.coeff(i)).value()).collect(),
        )
    }
}

impl Mul for &PolyFp {
    type Output = PolyFp;
    fn mul(self, o: &PolyFp) -> PolyFp {
        assert_eq!(self.modulus, o.modulus, "mixed moduli");
        if self.is_zero() || o.is_zero() {
            return PolyFp::zero(self.modulus);
        }
        let p = self.modulus as u128;
        let mut out = vec![0u128; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a as u128 * b as u128) % p;
            }
        }
        PolyFp::new(self.modulus, out.into_iter().map(|c| c as u64).collect())
    }
}

impl Neg for &PolyFp {
    type Output = PolyFp;
    fn neg(self) -> PolyFp {
        PolyFp::new(
            self.modulus,
            self.coeffs.iter().map(|&c| self.modulus - c).collect(),
        )
    }
}

crate::rings::ring_via_ops!(
    PolyFp,
    zero = |x| PolyFp::zero(x.modulus),
    one = |x| PolyFp::constant(Fp::one(x.modulus)),
    is_zero = |x| x.coeffs.is_empty()
);

impl fmt::Debug for PolyFp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (mod {})", self.modulus)
    }
}

/// `4*t^2 + 4*t^3`, ascending degree; unit coefficients are omitted.
impl fmt::Display for PolyFp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "t".to_string(),
                (1, c) => format!("{c}*t"),
                (i, 1) => format!("t^{i}"),
                (i, c) => format!("{c}*t^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Rational function `num(t)/den(t)` over Q with `den(0) != 0` in every
/// use made of it here. Serialized as two integer coefficient arrays.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatFunc {
    pub num: PolyQ,
    pub den: PolyQ,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct RatFuncRepr {
    pub num: Vec<i64>,
    pub den: Vec<i64>,
}

impl RatFunc {
    pub fn new(num: PolyQ, den: PolyQ) -> Self {
        RatFunc { num, den }
    }

    pub fn from_ints(num: &[i64], den: &[i64]) -> Self {
        RatFunc::new(PolyQ::from_ints(num), PolyQ::from_ints(den))
    }

    pub fn one() -> Self {
        RatFunc::new(PolyQ::one(), PolyQ::one())
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn value_at_zero(&self) -> Option<Rational> {
        let d = self.den.coeff(0);
        (!d.is_zero()).then(|| self.num.coeff(0) / d)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.num.eval_complex(z) / self.den.eval_complex(z)
    }

    /// Taylor coefficients at t = 0 through `t^(order-1)`; `None` if
    /// `den(0) = 0`.
    pub fn taylor(&self, order: usize) -> Option<Vec<Rational>> {
        let d0 = self.den.coeff(0);
        if d0.is_zero() {
            return None;
        }
        let inv = d0.recip();
        let mut out: Vec<Rational> = Vec::with_capacity(order);
        for k in 0..order {
            let mut acc = self.num.coeff(k);
            for j in 1..=k.min(self.den.coeffs().len().saturating_sub(1)) {
                let dj = &self.den.coeffs()[j];
                if !dj.is_zero() {
                    acc -= dj * &out[k - j];
                }
            }
            out.push(acc * &inv);
        }
        Some(out)
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc::new(-&self.num, self.den.clone())
    }

    /// Integer-coefficient form, clearing denominators of both parts by a
    /// common positive integer.
    pub fn to_repr(&self) -> RatFuncRepr {
        let lcm = self
            .num
            .coeffs()
            .iter()
            .chain(self.den.coeffs())
            .fold(BigInt::one(), |acc, c| {
                num_integer::Integer::lcm(&acc, c.denom())
            });
        let to_ints = |p: &PolyQ| -> Vec<i64> {
            p.coeffs()
                .iter()
                .map(|c| {
                    (c * Rational::from_integer(lcm.clone()))
                        .to_integer()
                        .to_i64()
                        .expect("coefficient fits in i64")
                })
                .collect()
        };
        RatFuncRepr {
            num: to_ints(&self.num),
            den: to_ints(&self.den),
        }
    }

    pub fn from_repr(s: &RatFuncRepr) -> Self {
        RatFunc::from_ints(&s.num, &s.den)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |p: &PolyQ| -> String {
            if p.is_zero() {
                return "0".into();
            }
            let terms: Vec<String> = p
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| match i {
                    0 => format!("{c}"),
                    1 => format!("{c}*t"),
                    _ => format!("{c}*t^{i}"),
                })
                .collect();
            terms.join(" + ")
        };
        if self.den == PolyQ::one() {
            write!(f, "{}", show(&self.num))
        } else {
            write!(f, "({})/({})", show(&self.num), show(&self.den))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::rat;

    #[test]
    fn fp_division_and_gcd() {
        let p = 7;
        let a = PolyFp::from_signed(p, &[-1, 0, 1]); // t^2 - 1
        let b = PolyFp::from_signed(p, &[1, 1]); // t + 1
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, PolyFp::from_signed(p, &[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&b), b);
        let c = PolyFp::from_signed(p, &[2, 0, 1]);
        assert_eq!(a.gcd(&c), PolyFp::from_signed(p, &[1]));
        assert!(c.div_exact(&b).is_none());
    }

    #[test]
    fn display_forms() {
        assert_eq!(PolyFp::from_signed(5, &[0, 0, 4, 4, 4]).to_string(), "4*t^2 + 4*t^3 + 4*t^4");
        assert_eq!(PolyFp::from_signed(5, &[1, 1, 0, 1]).to_string(), "1 + t + t^3");
        assert_eq!(PolyFp::zero(3).to_string(), "0");
    }

    #[test]
    fn frobenius_inflation() {
        let p = 5;
        let c = PolyFp::from_signed(p, &[-1, -1]);
        assert_eq!(c.pow(p), c.inflate(p as usize));
    }

    #[test]
    fn taylor_of_rational_function() {
        let f = RatFunc::from_ints(&[-1], &[1, 1]);
        assert_eq!(
            f.taylor(4).unwrap(),
            vec![rat(-1, 1), rat(1, 1), rat(-1, 1), rat(1, 1)]
        );
        assert!(RatFunc::from_ints(&[1], &[0, 1]).taylor(2).is_none());
    }

    #[test]
    fn repr_roundtrip() {
        let f = RatFunc::new(PolyQ::new(vec![rat(-3, 2)]), PolyQ::one());
        let s = f.to_repr();
        assert_eq!(s.num, vec![-3]);
        assert_eq!(s.den, vec![2]);
        assert_eq!(RatFunc::from_repr(&s).taylor(1), f.taylor(1));
    }
}
