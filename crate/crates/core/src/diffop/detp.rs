use std::fmt;

use num_traits::Zero;

use super::matrix::falling_factorial;
use super::DiffOperator;
use crate::error::{Error, Result};
use crate::rings::{is_prime, poly_bareiss_det, Fp, PolyFp, PolyQ, RatFunc};

/// `Det_p(D)` as a reduced fraction `num/den` over `F_p` with `den(0) = 1`.
/// For operators with polynomial-denominator-free determinants (all the
/// usual cases) `den = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetP {
    pub p: u64,
    pub num: PolyFp,
    pub den: PolyFp,
}

impl DetP {
    pub fn as_polynomial(&self) -> Option<&PolyFp> {
        (self.den.degree() == Some(0)).then_some(&self.num)
    }

    /// Coefficients of the power-series expansion at `t = 0`.
    pub fn series(&self, order: usize) -> Vec<Fp> {
        self.num
            .series_div(&self.den, order)
            .expect("den(0) = 1 by construction")
    }
}

impl fmt::Display for DetP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_polynomial() {
            Some(num) => write!(f, "{num} (mod {})", self.p),
            None => write!(f, "({}) / ({}) (mod {})", self.num, self.den, self.p),
        }
    }
}

fn reduce(p: u64, poly: &PolyQ, what: &str) -> Result<PolyFp> {
    poly.reduce(p).ok_or_else(|| Error::BadPrime {
        p,
        reason: format!("{p} divides a coefficient denominator of {what}"),
    })
}

fn reduce_ratfunc(p: u64, f: &RatFunc, what: &str) -> Result<(PolyFp, PolyFp)> {
    let num = reduce(p, &f.num, what)?;
    let den = reduce(p, &f.den, what)?;
    if den.coeff(0).is_zero() {
        return Err(Error::BadPrime {
            p,
            reason: format!("denominator of {what} vanishes at t = 0 modulo {p}"),
        });
    }
    Ok((num, den))
}

/// Determinant of `D` acting on `F_p[t][x]/(x^p)` in the basis
/// `1, x, …, x^{p−1}`, including the prefactor `c(t)^p`.
pub fn detp(d: &DiffOperator, p: u64) -> Result<DetP> {
    if !is_prime(p) {
        return Err(Error::BadPrime {
            p,
            reason: "not a prime".into(),
        });
    }
    let size = p as i64;
    let mut reduced = std::collections::BTreeMap::new();
    let mut dens: Vec<PolyFp> = Vec::new();
    for (&(a, k), f) in d.coefficients() {
        let (num, den) = reduce_ratfunc(p, f, &format!("t[{a},{k}]"))?;
        if !dens.contains(&den) {
            dens.push(den.clone());
        }
        reduced.insert((a, k), (num, den));
    }
    let common = dens
        .iter()
        .fold(PolyFp::constant(Fp::one(p)), |acc, x| &acc * x);

    let mut matrix = vec![vec![PolyFp::zero(p); p as usize]; p as usize];
    for j in 0..size {
        for k in 0..=d.max_derivative() as i64 {
            let ff = falling_factorial(j, k as usize)[0].clone();
            if ff.is_zero() {
                continue;
            }
            let ff = Fp::from_rational(&ff, p).expect("integer");
            for i in (j - k).max(0)..size {
                let Some((num, den)) = reduced.get(&((k + i - j) as usize, k as usize)) else {
                    continue;
                };
                let scaled = (num * &common.div_exact(den).expect("factor of product")).scale(ff);
                let cell = &mut matrix[i as usize][j as usize];
                *cell = &*cell + &scaled;
            }
        }
        let diag: i64 = d.exponents().iter().map(|l| j - l).product();
        let cell = &mut matrix[j as usize][j as usize];
        *cell = &*cell + &common.scale(Fp::new(diag, p));
    }
    let det = poly_bareiss_det(&matrix)?;

    let (cn, cd) = reduce_ratfunc(p, d.prefactor(), "the prefactor")?;
    let num = &det * &cn.inflate(p as usize);
    let den = &common.pow(p) * &cd.inflate(p as usize);
    Ok(normalize(p, num, den))
}

fn normalize(p: u64, num: PolyFp, den: PolyFp) -> DetP {
    if num.is_zero() {
        return DetP {
            p,
            num,
            den: PolyFp::constant(Fp::one(p)),
        };
    }
    let g = num.gcd(&den);
    let num = num.div_exact(&g).expect("gcd divides");
    let den = den.div_exact(&g).expect("gcd divides");
    let s = den.coeff(0).inv().expect("den(0) is nonzero");
    DetP {
        p,
        num: num.scale(s),
        den: den.scale(s),
    }
}
