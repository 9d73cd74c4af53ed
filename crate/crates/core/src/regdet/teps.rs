use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rings::{format_rational, Rational};
use crate::series::{EpsLaurent, TruncSeries};

/// `num(ε) / Π_c (ε − c)^{m_c}` with integer poles `c`. The numerator is an
/// exact polynomial in `ε` with truncated-series coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunctionEps {
    num: Vec<TruncSeries>,
    poles: BTreeMap<i64, usize>,
    order: usize,
}

impl RationalFunctionEps {
    pub fn from_factored(num: Vec<TruncSeries>, poles: BTreeMap<i64, usize>, order: usize) -> Self {
        let num = num.into_iter().map(|s| s.truncate(order)).collect();
        let poles = poles.into_iter().filter(|&(_, m)| m > 0).collect();
        RationalFunctionEps { num, poles, order }
    }

    /// Factors a denominator with rational coefficients (lowest degree
    /// first) over the integers; any non-integer root is rejected.
    pub fn new(num: Vec<TruncSeries>, den: &[Rational], order: usize) -> Result<Self> {
        let mut den: Vec<Rational> = den.to_vec();
        while den.last().is_some_and(Zero::is_zero) {
            den.pop();
        }
        if den.is_empty() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        let mut poles = BTreeMap::new();
        while den.len() > 1 {
            let root = integer_root(&den).ok_or_else(|| {
                Error::UnsupportedPole(format!(
                    "denominator {} has a non-integer root",
                    den.iter().map(format_rational).collect::<Vec<_>>().join(", ")
                ))
            })?;
            *poles.entry(root).or_insert(0) += 1;
            den = deflate(&den, root);
        }
        let unit = den[0].recip();
        let num = num.iter().map(|s| s.scale(&unit)).collect();
        Ok(RationalFunctionEps::from_factored(num, poles, order))
    }

    pub fn numerator(&self) -> &[TruncSeries] {
        &self.num
    }

    pub fn poles(&self) -> &BTreeMap<i64, usize> {
        &self.poles
    }
}

fn eval(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

fn integer_root(p: &[Rational]) -> Option<i64> {
    if p[0].is_zero() {
        return Some(0);
    }
    // Clear denominators; an integer root divides the constant term.
    let lcm = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let c0 = (&p[0] * Rational::from_integer(lcm)).to_integer().abs();
    let c0: i64 = c0.try_into().ok()?;
    let mut d = 1;
    while d * d <= c0 {
        if c0 % d == 0 {
            for cand in [d, c0 / d] {
                for r in [cand, -cand] {
                    if eval(p, &Rational::from_integer(r.into())).is_zero() {
                        return Some(r);
                    }
                }
            }
        }
        d += 1;
    }
    None
}

/// Divides by `(ε − r)`.
fn deflate(p: &[Rational], r: i64) -> Vec<Rational> {
    let r = Rational::from_integer(r.into());
    let mut out = vec![Rational::zero(); p.len() - 1];
    let mut carry = Rational::zero();
    for i in (1..p.len()).rev() {
        carry = &p[i] + carry * &r;
        out[i - 1] = carry.clone();
    }
    out
}

/// Power series of `(a + δ)^{-m}` in `δ` through `δ^(len-1)`, `a ≠ 0`.
fn inverse_power_series(a: i64, m: usize, len: usize) -> Vec<Rational> {
    // (a + δ)^{-m} = a^{-m} Σ_k binom(-m, k) (δ/a)^k
    let a = Rational::from_integer(a.into());
    let mut out = Vec::with_capacity(len);
    let mut coeff = Rational::one() / num_traits::pow(a.clone(), m);
    for k in 0..len {
        out.push(coeff.clone());
        let kk = Rational::from_integer(BigInt::from(k));
        coeff = coeff * (-(Rational::from_integer(BigInt::from(m)) + &kk))
            / ((kk + Rational::one()) * &a);
    }
    out
}

/// Kills the polynomial part of `f` and moves every principal part
/// `a/(ε − c)^j` to `a/ε^j`.
pub fn t_eps(f: &RationalFunctionEps) -> EpsLaurent {
    let order = f.order;
    let max_pole = f.poles.values().copied().max().unwrap_or(0);
    let mut terms = vec![TruncSeries::zero(order); max_pole];
    for (&c, &m) in &f.poles {
        // g(δ) = num(c + δ) / Π_{c' ≠ c} (c − c' + δ)^{m'} through δ^{m−1}.
        let mut g = shift_polynomial(&f.num, c, m, order);
        for (&c2, &m2) in &f.poles {
            if c2 == c {
                continue;
            }
            let s = inverse_power_series(c - c2, m2, m);
            g = mul_rational_series(&g, &s, m, order);
        }
        // f = g(δ)/δ^m, so the coefficient of δ^{−j} is g_{m−j}.
        for j in 1..=m {
            let slot = &mut terms[max_pole - j];
            *slot = &*slot + &g[m - j];
        }
    }
    EpsLaurent::new(-(max_pole as i64), terms, order, max_pole)
        .expect("pole order within the bound")
}

/// Coefficients of `num(c + δ)` in `δ` through `δ^(len-1)`.
fn shift_polynomial(num: &[TruncSeries], c: i64, len: usize, order: usize) -> Vec<TruncSeries> {
    let c = Rational::from_integer(c.into());
    let mut out = vec![TruncSeries::zero(order); len];
    // Σ_i a_i (c + δ)^i = Σ_k δ^k Σ_i a_i binom(i, k) c^{i−k}
    for (i, a) in num.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let mut binom = Rational::one();
        for (k, slot) in out.iter_mut().enumerate().take(len.min(i + 1)) {
            let w = &binom * num_traits::pow(c.clone(), i - k);
            *slot = &*slot + &a.scale(&w);
            binom = binom * Rational::from_integer(BigInt::from(i - k))
                / Rational::from_integer(BigInt::from(k + 1));
        }
    }
    out
}

fn mul_rational_series(
    a: &[TruncSeries],
    b: &[Rational],
    len: usize,
    order: usize,
) -> Vec<TruncSeries> {
    let mut out = vec![TruncSeries::zero(order); len];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j < len && !y.is_zero() {
                out[i + j] = &out[i + j] + &x.scale(y);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::rat;

    fn consts(v: &[i64], order: usize) -> Vec<TruncSeries> {
        v.iter().map(|&x| TruncSeries::constant(rat(x, 1), order)).collect()
    }

    fn laurent(lo: i64, v: &[i64], order: usize) -> EpsLaurent {
        EpsLaurent::new(lo, consts(v, order), order, (-lo) as usize).unwrap()
    }

    #[test]
    fn polynomial_part_vanishes() {
        let f = RationalFunctionEps::new(consts(&[0, 0, 0, 1], 2), &[rat(1, 1)], 2).unwrap();
        assert!(t_eps(&f).is_zero());
    }

    #[test]
    fn pure_pole_is_recentred() {
        // 1/(ε − 5)²
        let f = RationalFunctionEps::new(consts(&[1], 2), &[rat(25, 1), rat(-10, 1), rat(1, 1)], 2).unwrap();
        assert_eq!(f.poles(), &BTreeMap::from([(5, 2)]));
        assert_eq!(t_eps(&f), laurent(-2, &[1, 0], 2));
    }

    #[test]
    fn partial_fractions() {
        // (2ε+1)/(ε(ε−1)) = −1/ε + 3/(ε−1) ↦ 2/ε
        let f = RationalFunctionEps::new(consts(&[1, 2], 3), &[rat(0, 1), rat(-1, 1), rat(1, 1)], 3).unwrap();
        assert_eq!(t_eps(&f), laurent(-1, &[2], 3));
        // (ε² + 1)/((ε+2)²(ε−1)): principal parts checked against the
        // expansion at each pole.
        let den = [rat(-4, 1), rat(0, 1), rat(3, 1), rat(1, 1)];
        let f = RationalFunctionEps::new(consts(&[1, 0, 1], 3), &den, 3).unwrap();
        // At ε = 1: 2/9. At ε = −2: (5 − 4δ + δ²)/(δ²(−3+δ)) gives
        // −5/3 δ^{-2} + 7/9 δ^{-1}. Residues sum to 1 since f ~ 1/ε.
        let got = t_eps(&f);
        assert_eq!(got.coeff(-1), TruncSeries::constant(rat(1, 1), 3));
        assert_eq!(got.coeff(-2), TruncSeries::constant(rat(-5, 3), 3));
    }

    #[test]
    fn non_integer_pole_is_rejected() {
        let r = RationalFunctionEps::new(consts(&[1], 2), &[rat(-1, 1), rat(2, 1)], 2);
        assert!(matches!(r, Err(Error::UnsupportedPole(_))));
        let r = RationalFunctionEps::new(consts(&[1], 2), &[rat(1, 1), rat(0, 1), rat(1, 1)], 2);
        assert!(matches!(r, Err(Error::UnsupportedPole(_))));
    }
}
