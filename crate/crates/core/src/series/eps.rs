use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rings::Rational;
use crate::series::{series_inv, TruncSeries};

/// Polynomial `q_0 + q_1 ε + ... + q_E ε^E` with coefficients truncated at
/// `t^K`. Products drop every power of `ε` above the bound `E`, so this is
/// the ring `R[[t]][[ε]] / (t^K, ε^(E+1))`.
#[derive(Clone, PartialEq, Eq)]
pub struct EpsPoly {
    coeffs: Vec<TruncSeries>,
    order: usize,
}

impl EpsPoly {
    /// Pads with zeros or drops terms to obtain exactly `bound + 1`
    /// coefficients, each cut to `order`.
    pub fn new(coeffs: Vec<TruncSeries>, bound: usize, order: usize) -> Self {
        let mut c: Vec<TruncSeries> = coeffs
            .into_iter()
            .take(bound + 1)
            .map(|s| {
                assert!(s.order() >= order, "coefficient order below {order}");
                s.truncate(order)
            })
            .collect();
        c.resize(bound + 1, TruncSeries::zero(order));
        EpsPoly { coeffs: c, order }
    }

    pub fn zero(bound: usize, order: usize) -> Self {
        EpsPoly::new(Vec::new(), bound, order)
    }

    pub fn one(bound: usize, order: usize) -> Self {
        EpsPoly::constant(TruncSeries::one(order), bound)
    }

    pub fn constant(c: TruncSeries, bound: usize) -> Self {
        let order = c.order();
        EpsPoly::new(vec![c], bound, order)
    }

    /// `c ε^degree`.
    pub fn monomial(c: TruncSeries, degree: usize, bound: usize) -> Self {
        let order = c.order();
        let mut coeffs = vec![TruncSeries::zero(order); degree];
        coeffs.push(c);
        EpsPoly::new(coeffs, bound, order)
    }

    /// Polynomial in `ε` with rational (t-constant) coefficients.
    pub fn from_rationals(c: &[Rational], bound: usize, order: usize) -> Self {
        EpsPoly::new(
            c.iter().map(|x| TruncSeries::constant(x.clone(), order)).collect(),
            bound,
            order,
        )
    }

    pub fn bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[TruncSeries] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> &TruncSeries {
        &self.coeffs[j]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(TruncSeries::is_zero)
    }

    /// Largest `j` with `q_j ≠ 0`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    /// Nonzero modulo `(t, ε)`.
    pub fn is_unit(&self) -> bool {
        !self.coeffs[0].constant_term().is_zero()
    }

    pub fn with_bound(&self, bound: usize) -> Self {
        EpsPoly::new(self.coeffs.clone(), bound, self.order)
    }

    pub fn with_order(&self, order: usize) -> Self {
        EpsPoly::new(self.coeffs.clone(), self.bound(), order.min(self.order))
    }

    pub fn scale(&self, c: &TruncSeries) -> Self {
        EpsPoly::new(
            self.coeffs.iter().map(|x| x * c).collect(),
            self.bound(),
            self.order.min(c.order()),
        )
    }

    /// Multiplication by `ε^k`.
    pub fn shift(&self, k: usize) -> Self {
        let mut coeffs = vec![TruncSeries::zero(self.order); k];
        coeffs.extend(self.coeffs.iter().cloned());
        EpsPoly::new(coeffs, self.bound(), self.order)
    }

    /// Substitutes a rational value for `ε`, ignoring the `ε` truncation.
    pub fn eval(&self, eps: &Rational) -> TruncSeries {
        let mut acc = TruncSeries::zero(self.order);
        for c in self.coeffs.iter().rev() {
            acc = &acc.scale(eps) + c;
        }
        acc
    }

    /// The image modulo `t`, a polynomial in `ε` with rational coefficients.
    pub fn constant_terms(&self) -> Vec<Rational> {
        self.coeffs.iter().map(|c| c.constant_term().clone()).collect()
    }

    /// Inverse in the truncated ring; needs a unit constant term.
    pub fn inv(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotAUnit);
        }
        let e = self.bound();
        let inv0 = series_inv(&self.coeffs[0])?;
        let mut out: Vec<TruncSeries> = Vec::with_capacity(e + 1);
        out.push(inv0.clone());
        for k in 1..=e {
            let mut acc = TruncSeries::zero(self.order);
            for j in 1..=k {
                if !self.coeffs[j].is_zero() && !out[k - j].is_zero() {
                    acc = &acc + &(&self.coeffs[j] * &out[k - j]);
                }
            }
            out.push(-&(&acc * &inv0));
        }
        Ok(EpsPoly::new(out, e, self.order))
    }

    fn zip(&self, o: &Self, f: impl Fn(&TruncSeries, &TruncSeries) -> TruncSeries) -> Self {
        let e = self.bound().min(o.bound());
        let order = self.order.min(o.order);
        EpsPoly::new(
            (0..=e).map(|j| f(&self.coeffs[j], &o.coeffs[j])).collect(),
            e,
            order,
        )
    }
}

impl Add for &EpsPoly {
    type Output = EpsPoly;
    fn add(self, o: &EpsPoly) -> EpsPoly {
        self.zip(o, |a, b| a + b)
    }
}

impl Sub for &EpsPoly {
    type Output = EpsPoly;
    fn sub(self, o: &EpsPoly) -> EpsPoly {
        self.zip(o, |a, b| a - b)
    }
}

impl Neg for &EpsPoly {
    type Output = EpsPoly;
    fn neg(self) -> EpsPoly {
        EpsPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            order: self.order,
        }
    }
}

impl Mul for &EpsPoly {
    type Output = EpsPoly;
    fn mul(self, o: &EpsPoly) -> EpsPoly {
        let e = self.bound().min(o.bound());
        let order = self.order.min(o.order);
        let mut out = vec![TruncSeries::zero(order); e + 1];
        for (i, a) in self.coeffs[..=e].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs[..=e - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        EpsPoly { coeffs: out, order }
    }
}

crate::rings::ring_via_ops!(
    EpsPoly,
    zero = |x| EpsPoly::zero(x.bound(), x.order),
    one = |x| EpsPoly::one(x.bound(), x.order),
    is_zero = |x| x.coeffs.iter().all(TruncSeries::is_zero)
);

impl fmt::Debug for EpsPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for EpsPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_eps_terms(f, self.coeffs.iter().enumerate().map(|(j, c)| (j as i64, c)))?;
        write!(f, " + O(ε^{})", self.bound() + 1)
    }
}

fn fmt_eps_terms<'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (i64, &'a TruncSeries)>,
) -> fmt::Result {
    let parts: Vec<String> = terms
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, c)| match j {
            0 => format!("({c})"),
            1 => format!("({c})*ε"),
            _ => format!("({c})*ε^{j}"),
        })
        .collect();
    if parts.is_empty() {
        write!(f, "0")
    } else {
        write!(f, "{}", parts.join(" + "))
    }
}

/// Finite Laurent expansion `Σ_{lo ≤ j ≤ hi} f_j ε^j` with coefficients
/// truncated at `t^K` and pole order at most the bound fixed at construction.
#[derive(Clone, PartialEq, Eq)]
pub struct EpsLaurent {
    min_deg: i64,
    terms: Vec<TruncSeries>,
    order: usize,
    pole_bound: usize,
}

impl EpsLaurent {
    pub fn new(
        min_deg: i64,
        terms: Vec<TruncSeries>,
        order: usize,
        pole_bound: usize,
    ) -> Result<Self> {
        let terms: Vec<TruncSeries> = terms.into_iter().map(|s| s.truncate(order)).collect();
        if let Some(k) = terms.iter().position(|c| !c.is_zero()) {
            let lead = min_deg + k as i64;
            if lead < -(pole_bound as i64) {
                return Err(Error::InvalidInput(format!(
                    "pole of order {} exceeds the bound {pole_bound}",
                    -lead
                )));
            }
        }
        Ok(EpsLaurent {
            min_deg,
            terms,
            order,
            pole_bound,
        }
        .trimmed())
    }

    pub fn zero(order: usize, pole_bound: usize) -> Self {
        EpsLaurent {
            min_deg: 0,
            terms: Vec::new(),
            order,
            pole_bound,
        }
    }

    pub fn from_poly(q: &EpsPoly) -> Self {
        EpsLaurent {
            min_deg: 0,
            terms: q.coeffs().to_vec(),
            order: q.order(),
            pole_bound: 0,
        }
        .trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.terms.last().is_some_and(TruncSeries::is_zero) {
            self.terms.pop();
        }
        let lead = self.terms.iter().position(|c| !c.is_zero()).unwrap_or(0);
        self.terms.drain(..lead);
        self.min_deg += lead as i64;
        if self.terms.is_empty() {
            self.min_deg = 0;
        }
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn pole_bound(&self) -> usize {
        self.pole_bound
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest and highest degrees carrying a nonzero coefficient.
    pub fn degree_range(&self) -> Option<(i64, i64)> {
        (!self.terms.is_empty())
            .then(|| (self.min_deg, self.min_deg + self.terms.len() as i64 - 1))
    }

    pub fn pole_order(&self) -> usize {
        match self.degree_range() {
            Some((lo, _)) if lo < 0 => (-lo) as usize,
            _ => 0,
        }
    }

    pub fn coeff(&self, j: i64) -> TruncSeries {
        let k = j - self.min_deg;
        if k < 0 || k >= self.terms.len() as i64 {
            TruncSeries::zero(self.order)
        } else {
            self.terms[k as usize].clone()
        }
    }

    /// Every coefficient has zero constant term, so powers vanish from the
    /// `K`-th on.
    pub fn is_t_small(&self) -> bool {
        self.terms.iter().all(|c| c.constant_term().is_zero())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        EpsLaurent {
            min_deg: self.min_deg,
            terms: self.terms.iter().map(|x| x.scale(c)).collect(),
            order: self.order,
            pole_bound: self.pole_bound,
        }
        .trimmed()
    }

    /// Restriction to degrees in `[lo, hi]`.
    pub fn window(&self, lo: i64, hi: i64) -> Self {
        let terms = (lo..=hi).map(|j| self.coeff(j)).collect();
        EpsLaurent {
            min_deg: lo,
            terms,
            order: self.order,
            pole_bound: self.pole_bound.min((-lo).max(0) as usize),
        }
        .trimmed()
    }

    /// Product restricted to degrees in `[lo, hi]`.
    pub fn mul_window(&self, o: &Self, lo: i64, hi: i64) -> Self {
        let order = self.order.min(o.order);
        let pole_bound = (-lo).max(0) as usize;
        let (Some((a0, a1)), Some((b0, b1))) = (self.degree_range(), o.degree_range()) else {
            return EpsLaurent::zero(order, pole_bound);
        };
        let lo = lo.max(a0 + b0);
        let hi = hi.min(a1 + b1);
        if lo > hi {
            return EpsLaurent::zero(order, pole_bound);
        }
        let mut out = vec![TruncSeries::zero(order); (hi - lo + 1) as usize];
        for (i, a) in self.terms.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let da = a0 + i as i64;
            for (j, b) in o.terms.iter().enumerate() {
                let d = da + b0 + j as i64;
                if d < lo || d > hi || b.is_zero() {
                    continue;
                }
                let slot = &mut out[(d - lo) as usize];
                *slot = &*slot + &(a * b);
            }
        }
        EpsLaurent {
            min_deg: lo,
            terms: out,
            order,
            pole_bound,
        }
        .trimmed()
    }

    /// `exp(f)` for t-small `f`, restricted to degrees in `[lo, hi]`. Exact on
    /// that range whenever the degrees of `f` are all ≤ 0 or all ≥ 0.
    pub fn exp_window(&self, lo: i64, hi: i64) -> Result<Self> {
        if !self.is_t_small() {
            return Err(Error::InvalidInput(
                "exp needs coefficients with zero constant term".into(),
            ));
        }
        let pole_bound = (-lo).max(0) as usize;
        let one = EpsLaurent::new(0, vec![TruncSeries::one(self.order)], self.order, pole_bound)?
            .window(lo, hi);
        let mut acc = one.clone();
        let mut power = one;
        for k in 1..self.order {
            power = power
                .mul_window(self, lo, hi)
                .scale(&Rational::new(BigInt::from(1), BigInt::from(k)));
            if power.is_zero() {
                break;
            }
            acc = &acc + &power;
        }
        acc.pole_bound = pole_bound;
        Ok(acc)
    }

    /// Drops the polynomial part and keeps the principal part.
    pub fn principal_part(&self) -> Self {
        match self.degree_range() {
            Some((lo, _)) if lo < 0 => self.window(lo, -1),
            _ => EpsLaurent::zero(self.order, self.pole_bound),
        }
    }
}

impl Add for &EpsLaurent {
    type Output = EpsLaurent;
    fn add(self, o: &EpsLaurent) -> EpsLaurent {
        let order = self.order.min(o.order);
        let pole_bound = self.pole_bound.max(o.pole_bound);
        let range = match (self.degree_range(), o.degree_range()) {
            (None, None) => return EpsLaurent::zero(order, pole_bound),
            (Some(r), None) | (None, Some(r)) => r,
            (Some(a), Some(b)) => (a.0.min(b.0), a.1.max(b.1)),
        };
        let terms = (range.0..=range.1)
            .map(|j| (&self.coeff(j) + &o.coeff(j)).truncate(order))
            .collect();
        EpsLaurent {
            min_deg: range.0,
            terms,
            order,
            pole_bound,
        }
        .trimmed()
    }
}

impl Neg for &EpsLaurent {
    type Output = EpsLaurent;
    fn neg(self) -> EpsLaurent {
        self.scale(&Rational::from_integer((-1).into()))
    }
}

impl Sub for &EpsLaurent {
    type Output = EpsLaurent;
    fn sub(self, o: &EpsLaurent) -> EpsLaurent {
        self + &(-o)
    }
}

/// `(L_{<0} f, L_{≥0} f)`: the principal part and the polynomial part. The
/// polynomial part carries an `ε` bound equal to its degree.
pub fn eps_split(f: &EpsLaurent) -> (EpsLaurent, EpsPoly) {
    let neg = f.principal_part();
    let pos: Vec<TruncSeries> = match f.degree_range() {
        Some((_, hi)) if hi >= 0 => (0..=hi).map(|j| f.coeff(j)).collect(),
        _ => Vec::new(),
    };
    let bound = pos.len().saturating_sub(1);
    (neg, EpsPoly::new(pos, bound, f.order))
}

impl fmt::Debug for EpsLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for EpsLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_eps_terms(
            f,
            self.terms
                .iter()
                .enumerate()
                .map(|(i, c)| (self.min_deg + i as i64, c)),
        )
    }
}

impl From<&EpsPoly> for EpsLaurent {
    fn from(q: &EpsPoly) -> Self {
        EpsLaurent::from_poly(q)
    }
}
