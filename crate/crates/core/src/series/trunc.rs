use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rings::{RatFunc, Rational};

/// Power series `c_0 + c_1 t + ... + c_{K-1} t^{K-1} + O(t^K)` with exact
/// rational coefficients. `K = coeffs.len() >= 1` is the truncation order;
/// binary operations produce the smaller of the two orders.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncSeries {
    coeffs: Vec<Rational>,
}

impl TruncSeries {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "truncation order must be at least 1");
        TruncSeries { coeffs }
    }

    /// Pads or cuts `coeffs` to exactly `order` entries.
    pub fn from_coeffs(mut coeffs: Vec<Rational>, order: usize) -> Self {
        coeffs.resize(order, Rational::zero());
        TruncSeries::new(coeffs)
    }

    pub fn zero(order: usize) -> Self {
        TruncSeries::new(vec![Rational::zero(); order])
    }

    pub fn one(order: usize) -> Self {
        TruncSeries::constant(Rational::one(), order)
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        let mut s = TruncSeries::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// `c * t^degree`, which is zero when `degree >= order`.
    pub fn monomial(c: Rational, degree: usize, order: usize) -> Self {
        let mut s = TruncSeries::zero(order);
        if degree < order {
            s.coeffs[degree] = c;
        }
        s
    }

    pub fn from_ratfunc(f: &RatFunc, order: usize) -> Result<Self> {
        f.taylor(order)
            .map(TruncSeries::new)
            .ok_or_else(|| Error::NonInvertibleDenominator {
                what: f.to_string(),
            })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Rational {
        &self.coeffs[i]
    }

    pub fn constant_term(&self) -> &Rational {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Index of the first nonzero coefficient, `None` for the zero series.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        let k = order.min(self.order());
        TruncSeries::new(self.coeffs[..k].to_vec())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return TruncSeries::zero(self.order());
        }
        TruncSeries::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.order();
        let mut out = vec![Rational::zero(); n];
        for i in k..n {
            out[i] = self.coeffs[i - k].clone();
        }
        TruncSeries::new(out)
    }

    pub fn derivative(&self) -> Self {
        let n = self.order();
        TruncSeries::new(
            (0..n)
                .map(|i| {
                    if i + 1 < n {
                        &self.coeffs[i + 1] * Rational::from_integer(BigInt::from(i + 1))
                    } else {
                        Rational::zero()
                    }
                })
                .collect(),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = TruncSeries::one(self.order());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Value at a rational point of the truncated polynomial.
    pub fn eval_polynomial(&self, t: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * t + c)
    }

    fn binop(&self, o: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        let k = self.order().min(o.order());
        TruncSeries::new((0..k).map(|i| f(&self.coeffs[i], &o.coeffs[i])).collect())
    }
}

impl Add for &TruncSeries {
    type Output = TruncSeries;
    fn add(self, o: &TruncSeries) -> TruncSeries {
        self.binop(o, |a, b| a + b)
    }
}

impl Sub for &TruncSeries {
    type Output = TruncSeries;
    fn sub(self, o: &TruncSeries) -> TruncSeries {
        self.binop(o, |a, b| a - b)
    }
}

impl Mul for &TruncSeries {
    type Output = TruncSeries;
    fn mul(self, o: &TruncSeries) -> TruncSeries {
        let k = self.order().min(o.order());
        let mut out = vec![Rational::zero(); k];
        for (i, a) in self.coeffs[..k].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs[..k - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        TruncSeries::new(out)
    }
}

impl Neg for &TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        TruncSeries::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

crate::rings::ring_via_ops!(
    TruncSeries,
    zero = |s| TruncSeries::zero(s.order()),
    one = |s| TruncSeries::one(s.order()),
    is_zero = |s| s.coeffs.iter().all(Zero::is_zero)
);

/// Multiplicative inverse of a series with nonzero constant term.
pub fn series_inv(s: &TruncSeries) -> Result<TruncSeries> {
    let c0 = s.constant_term();
    if c0.is_zero() {
        return Err(Error::NotAUnit);
    }
    let inv0 = c0.recip();
    let n = s.order();
    let mut out: Vec<Rational> = Vec::with_capacity(n);
    out.push(inv0.clone());
    for k in 1..n {
        let mut acc = Rational::zero();
        for j in 1..=k {
            let sj = &s.coeffs[j];
            if !sj.is_zero() {
                acc += sj * &out[k - j];
            }
        }
        out.push(-acc * &inv0);
    }
    Ok(TruncSeries::new(out))
}

/// Logarithm of a series with constant term 1, via `log s = ∫ s'/s`.
pub fn series_log(s: &TruncSeries) -> Result<TruncSeries> {
    if !s.constant_term().is_one() {
        return Err(Error::InvalidInput(
            "log requires constant term 1".into(),
        ));
    }
    let q = &s.derivative() * &series_inv(s)?;
    let n = s.order();
    let mut out = vec![Rational::zero(); n];
    for i in 1..n {
        out[i] = q.coeff(i - 1) / Rational::from_integer(BigInt::from(i));
    }
    Ok(TruncSeries::new(out))
}

/// Exponential of a series with zero constant term, via `e' = s' e`.
pub fn series_exp(s: &TruncSeries) -> Result<TruncSeries> {
    if !s.constant_term().is_zero() {
        return Err(Error::InvalidInput(
            "exp requires zero constant term".into(),
        ));
    }
    let n = s.order();
    let mut out: Vec<Rational> = Vec::with_capacity(n);
    out.push(Rational::one());
    for k in 1..n {
        let mut acc = Rational::zero();
        for j in 1..=k {
            let sj = &s.coeffs[j];
            if !sj.is_zero() {
                acc += sj * Rational::from_integer(BigInt::from(j)) * &out[k - j];
            }
        }
        out.push(acc / Rational::from_integer(BigInt::from(k)));
    }
    Ok(TruncSeries::new(out))
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

/// Square root of `t^(2v) u` with `u(0)` a nonzero rational square. The
/// result has order `K - v` and a positive leading coefficient.
pub fn series_sqrt(s: &TruncSeries) -> Result<TruncSeries> {
    let order = s.order();
    let Some(v2) = s.valuation() else {
        return Ok(TruncSeries::zero(order.div_ceil(2)));
    };
    if v2 % 2 == 1 {
        return Err(Error::NoSquareRoot(format!("odd valuation {v2}")));
    }
    let v = v2 / 2;
    let u = &s.coeffs[v2..];
    let r0 = rational_sqrt(&u[0]).ok_or_else(|| {
        Error::NoSquareRoot(format!("leading coefficient {} is not a square", u[0]))
    })?;
    let m = u.len();
    let two_r0_inv = (&r0 * Rational::from_integer(2.into())).recip();
    let mut r: Vec<Rational> = Vec::with_capacity(m);
    r.push(r0);
    for k in 1..m {
        let mut acc = u[k].clone();
        for j in 1..k {
            acc -= &r[j] * &r[k - j];
        }
        r.push(acc * &two_r0_inv);
    }
    let mut out = vec![Rational::zero(); v];
    out.extend(r);
    out.truncate(order - v);
    Ok(TruncSeries::new(out))
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `1/2*t + 1/24*t^2 + O(t^4)`.
impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| monomial_string(c, i as i64, "t"))
            .collect();
        if terms.is_empty() {
            write!(f, "0 + O(t^{})", self.order())
        } else {
            write!(f, "{} + O(t^{})", terms.join(" + "), self.order())
        }
    }
}

pub(crate) fn monomial_string(c: &Rational, e: i64, var: &str) -> String {
    let c = crate::rings::format_rational(c);
    match e {
        0 => c,
        1 => format!("{c}*{var}"),
        _ => format!("{c}*{var}^{e}"),
    }
}
