use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rings::Rational;
use crate::series::TruncSeries;

/// Laurent series `Σ_{v ≤ i < P} c_i t^i + O(t^P)` with absolute precision
/// `P`. The valuation may be negative. Nonzero series are stored with a
/// nonzero leading coefficient; the zero series has `valuation == precision`.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    valuation: i64,
    coeffs: Vec<Rational>,
}

impl LaurentSeries {
    /// Coefficients of `t^valuation, t^(valuation+1), ...`; the precision is
    /// `valuation + coeffs.len()`.
    pub fn new(valuation: i64, coeffs: Vec<Rational>) -> Self {
        let mut s = LaurentSeries { valuation, coeffs };
        s.normalize();
        s
    }

    pub fn zero(precision: i64) -> Self {
        LaurentSeries {
            valuation: precision,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(c: Rational, precision: i64) -> Self {
        if precision <= 0 {
            return LaurentSeries::zero(precision);
        }
        let mut coeffs = vec![Rational::zero(); precision as usize];
        coeffs[0] = c;
        LaurentSeries::new(0, coeffs)
    }

    pub fn monomial(c: Rational, degree: i64, precision: i64) -> Self {
        if degree >= precision {
            return LaurentSeries::zero(precision);
        }
        let mut coeffs = vec![Rational::zero(); (precision - degree) as usize];
        coeffs[0] = c;
        LaurentSeries::new(degree, coeffs)
    }

    pub fn from_trunc(s: &TruncSeries) -> Self {
        LaurentSeries::new(0, s.coeffs().to_vec())
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(k) => {
                self.coeffs.drain(..k);
                self.valuation += k as i64;
            }
            None => {
                self.valuation += self.coeffs.len() as i64;
                self.coeffs.clear();
            }
        }
    }

    /// Valuation of a nonzero series; for zero this is the precision.
    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn precision(&self) -> i64 {
        self.valuation + self.coeffs.len() as i64
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `t^i`; `None` beyond the precision.
    pub fn coeff(&self, i: i64) -> Option<Rational> {
        if i >= self.precision() {
            None
        } else if i < self.valuation {
            Some(Rational::zero())
        } else {
            Some(self.coeffs[(i - self.valuation) as usize].clone())
        }
    }

    /// Cuts to a smaller precision, or declares the missing coefficients to
    /// be exactly zero up to a larger one.
    pub fn with_precision(&self, precision: i64) -> Self {
        if self.is_zero() {
            return LaurentSeries::zero(precision);
        }
        if precision <= self.valuation {
            return LaurentSeries::zero(precision);
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.resize((precision - self.valuation) as usize, Rational::zero());
        LaurentSeries::new(self.valuation, coeffs)
    }

    /// Coefficients of `t^0 .. t^(order-1)`.
    pub fn to_trunc(&self, order: usize) -> Result<TruncSeries> {
        if !self.is_zero() && self.valuation < 0 {
            return Err(Error::InvalidInput(format!(
                "series has a pole of order {}",
                -self.valuation
            )));
        }
        if self.precision() < order as i64 {
            return Err(Error::InvalidInput(format!(
                "precision {} is below the requested order {order}",
                self.precision()
            )));
        }
        Ok(TruncSeries::new(
            (0..order as i64).map(|i| self.coeff(i).unwrap()).collect(),
        ))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        LaurentSeries::new(self.valuation, self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotAUnit);
        }
        let s = series_inv_coeffs(&self.coeffs);
        Ok(LaurentSeries::new(-self.valuation, s))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self * &o.inv()?)
    }
}

fn series_inv_coeffs(a: &[Rational]) -> Vec<Rational> {
    let inv0 = a[0].recip();
    let mut out: Vec<Rational> = Vec::with_capacity(a.len());
    out.push(inv0.clone());
    for k in 1..a.len() {
        let mut acc = Rational::zero();
        for j in 1..=k {
            if !a[j].is_zero() {
                acc += &a[j] * &out[k - j];
            }
        }
        out.push(-acc * &inv0);
    }
    out
}

impl Add for &LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, o: &LaurentSeries) -> LaurentSeries {
        let prec = self.precision().min(o.precision());
        let v = self.valuation.min(o.valuation).min(prec);
        let coeffs = (v..prec)
            .map(|i| self.coeff(i).unwrap() + o.coeff(i).unwrap())
            .collect();
        LaurentSeries::new(v, coeffs)
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        LaurentSeries {
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Sub for &LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, o: &LaurentSeries) -> LaurentSeries {
        self + &(-o)
    }
}

impl Mul for &LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, o: &LaurentSeries) -> LaurentSeries {
        let prec = (self.valuation + o.precision()).min(o.valuation + self.precision());
        let v = self.valuation + o.valuation;
        if self.is_zero() || o.is_zero() || prec <= v {
            return LaurentSeries::zero(prec);
        }
        let len = (prec - v) as usize;
        let mut out = vec![Rational::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(len - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        LaurentSeries::new(v, out)
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| super::trunc::monomial_string(c, self.valuation + i as i64, "t"))
            .collect();
        let body = if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        };
        write!(f, "{body} + O(t^{})", self.precision())
    }
}

impl LaurentSeries {
    pub fn is_one(&self) -> bool {
        self.valuation == 0 && self.coeffs.first().is_some_and(One::is_one)
            && self.coeffs[1..].iter().all(Zero::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::rat;

    #[test]
    fn precision_tracking() {
        let t = LaurentSeries::monomial(rat(1, 1), 1, 6);
        let inv = t.inv().unwrap();
        assert_eq!(inv.valuation(), -1);
        assert_eq!(inv.precision(), 4);
        let one = &t * &inv;
        assert_eq!(one.precision(), 5);
        assert!(one.is_one());
        let z = &t - &t;
        assert!(z.is_zero());
        assert_eq!(z.precision(), 6);
    }

    #[test]
    fn division_with_pole() {
        // (t + t^2) / t^2 = 1/t + 1
        let a = LaurentSeries::new(1, vec![rat(1, 1), rat(1, 1), rat(0, 1), rat(0, 1)]);
        let b = LaurentSeries::monomial(rat(1, 1), 2, 8);
        let q = a.div(&b).unwrap();
        assert_eq!(q.valuation(), -1);
        assert_eq!(q.coeff(-1), Some(rat(1, 1)));
        assert_eq!(q.coeff(0), Some(rat(1, 1)));
        assert_eq!(q.coeff(2), Some(rat(0, 1)));
        assert_eq!(q.precision(), 3);
        assert!(q.to_trunc(2).is_err());
    }

    #[test]
    fn trunc_roundtrip() {
        let s = TruncSeries::new(vec![rat(0, 1), rat(1, 2), rat(1, 24)]);
        let l = LaurentSeries::from_trunc(&s);
        assert_eq!(l.valuation(), 1);
        assert_eq!(l.to_trunc(3).unwrap(), s);
        assert_eq!(l.to_string(), "1/2*t + 1/24*t^2 + O(t^3)");
    }
}
