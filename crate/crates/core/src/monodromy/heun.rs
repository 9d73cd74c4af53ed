use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::rings::rat;
#[cfg(test)]
use crate::rings::Rational;
use crate::series::{LaurentSeries, TruncSeries};

/// Value and first derivative, both as t-Laurent series.
#[derive(Clone, Debug)]
struct Dual {
    v: LaurentSeries,
    d: LaurentSeries,
}

impl Dual {
    fn constant(c: i64, prec: i64) -> Self {
        Dual {
            v: LaurentSeries::constant(rat(c, 1), prec),
            d: LaurentSeries::zero(prec),
        }
    }

    fn variable(x: LaurentSeries, prec: i64) -> Self {
        Dual {
            v: x,
            d: LaurentSeries::constant(rat(1, 1), prec),
        }
    }

    fn shifted(&self, c: i64, prec: i64) -> Self {
        self + &Dual::constant(c, prec)
    }

    fn div(&self, o: &Dual) -> Result<Dual> {
        let inv = o.v.inv()?;
        let v = &self.v * &inv;
        let d = &(&(&self.d * &o.v) - &(&self.v * &o.d)) * &(&inv * &inv);
        Ok(Dual { v, d })
    }
}

impl Add for &Dual {
    type Output = Dual;
    fn add(self, o: &Dual) -> Dual {
        Dual {
            v: &self.v + &o.v,
            d: &self.d + &o.d,
        }
    }
}

impl Sub for &Dual {
    type Output = Dual;
    fn sub(self, o: &Dual) -> Dual {
        Dual {
            v: &self.v - &o.v,
            d: &self.d - &o.d,
        }
    }
}

impl Mul for &Dual {
    type Output = Dual;
    fn mul(self, o: &Dual) -> Dual {
        Dual {
            v: &self.v * &o.v,
            d: &(&self.v * &o.d) + &(&self.d * &o.v),
        }
    }
}

impl Neg for &Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual {
            v: -&self.v,
            d: -&self.d,
        }
    }
}

/// The Heun continued-fraction equation `B₁(λ) + B₂(λ) = 1`, truncated to
/// `depth` levels per branch. Branch `r` is
/// `1 − u f_r(0) / (1 − u f_r(1) / (1 − …))` with `u = t/(1+t)²`,
/// `f₁(i) = (λ+2+i)² / ((λ+1+i)(λ+3+i))` and
/// `f₂(i) = (λ+1−i)² / ((λ−i)(λ+2−i))`.
#[derive(Clone, Debug)]
pub struct CfEquation {
    pub depth: usize,
    pub u: TruncSeries,
}

impl CfEquation {
    pub fn new(depth: usize, order: usize) -> Self {
        // u = t (1+t)^{-2} = Σ (-1)^{k-1} k t^k
        let coeffs = (0..order)
            .map(|k| {
                let s = if k % 2 == 1 { 1 } else { -1 };
                rat(s * k as i64, 1)
            })
            .collect();
        CfEquation {
            depth,
            u: TruncSeries::new(coeffs),
        }
    }

    fn level(&self, lam: &Dual, branch: u8, i: i64, prec: i64) -> Result<Dual> {
        let (a, b, c) = match branch {
            1 => (2 + i, 1 + i, 3 + i),
            _ => (1 - i, -i, 2 - i),
        };
        let num = lam.shifted(a, prec);
        let num = &num * &num;
        let den = &lam.shifted(b, prec) * &lam.shifted(c, prec);
        num.div(&den)
    }

    fn branch(&self, lam: &Dual, branch: u8, u: &Dual, prec: i64) -> Result<Dual> {
        let one = Dual::constant(1, prec);
        let mut tail = one.clone();
        for i in (0..self.depth as i64).rev() {
            let f = self.level(lam, branch, i, prec)?;
            tail = &one - &(u * &f).div(&tail)?;
        }
        Ok(tail)
    }

    /// `B₁ + B₂ − 1` and its derivative in λ.
    fn residual(&self, lam: &Dual, prec: i64) -> Result<Dual> {
        let u = Dual {
            v: LaurentSeries::from_trunc(&self.u).with_precision(prec),
            d: LaurentSeries::zero(prec),
        };
        let b1 = self.branch(lam, 1, &u, prec)?;
        let b2 = self.branch(lam, 2, &u, prec)?;
        Ok(&(&b1 + &b2) - &Dual::constant(1, prec))
    }

    /// Newton correction `F(λ)/F'(λ)` at working precision `prec`.
    fn newton_step(&self, lam: &LaurentSeries, prec: i64) -> Result<LaurentSeries> {
        let x = Dual::variable(lam.with_precision(prec), prec);
        let r = self.residual(&x, prec)?;
        r.v.div(&r.d)
    }

    fn with_u_order(&self, order: i64) -> CfEquation {
        if (self.u.order() as i64) < order {
            CfEquation::new(self.depth, order as usize)
        } else {
            self.clone()
        }
    }

    /// Newton iteration from the seed `t/2` until the correction vanishes
    /// through `t^{order-1}`. Early steps run at roughly half the final
    /// precision each, matching the quadratic convergence.
    pub fn solve(&self, order: usize) -> Result<LaurentSeries> {
        let target = order as i64;
        let eq = self.with_u_order(target + 32);
        for margin in [6i64, 16, 32] {
            let prec = target + margin;
            let mut ladder = vec![prec];
            while *ladder.last().unwrap() > 6 {
                let p = *ladder.last().unwrap();
                ladder.push(p / 2 + 2);
            }
            ladder.reverse();
            let mut lam = LaurentSeries::monomial(rat(1, 2), 1, prec);
            for &p in &ladder[..ladder.len() - 1] {
                let step = eq.newton_step(&lam, p)?;
                lam = &lam.with_precision(p) - &step;
            }
            for _ in 0..8 {
                let step = eq.newton_step(&lam, prec)?;
                lam = &lam.with_precision(prec) - &step;
                if lam.precision() < target {
                    break;
                }
                if step.valuation() >= target {
                    return Ok(lam.with_precision(target));
                }
            }
        }
        Err(Error::SolverFailure(format!(
            "Newton iteration did not settle through t^{}",
            order - 1
        )))
    }

    /// Whether `lam` already solves this truncation through `t^{order-1}`:
    /// the Newton correction vanishes there.
    pub fn certifies(&self, lam: &LaurentSeries, order: usize) -> Result<bool> {
        let target = order as i64;
        let eq = self.with_u_order(target + 32);
        for margin in [6i64, 16, 32] {
            let step = eq.newton_step(lam, target + margin)?;
            if step.precision() >= target {
                return Ok(step.valuation() >= target);
            }
        }
        Ok(false)
    }
}

/// Monodromy exponent `λ(t) = t/2 + …` of the Heun operator, exact through
/// `t^{K-1}`. The depth-`K+2` solution is certified by checking that it also
/// solves the depth-`K+4` truncation to the same order.
pub fn lambda_heun(order: usize) -> Result<LaurentSeries> {
    if order < 2 {
        return Err(Error::InvalidInput(format!("order must be >= 2, got {order}")));
    }
    let depth = order + 2;
    let lam = CfEquation::new(depth, order + 8).solve(order)?;
    if !CfEquation::new(depth + 2, order + 8).certifies(&lam, order)? {
        return Err(Error::SolverFailure(format!(
            "depth {depth} and depth {} disagree below t^{order}",
            depth + 2
        )));
    }
    Ok(lam)
}

/// Coefficients of `t^0 … t^{K-1}` as a truncated series.
pub fn lambda_heun_series(order: usize) -> Result<TruncSeries> {
    lambda_heun(order)?.to_trunc(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn as_rationals(s: &LaurentSeries, order: usize) -> Vec<Rational> {
        (0..order as i64).map(|i| s.coeff(i).unwrap()).collect()
    }

    fn expected_lambda() -> Vec<Rational> {
        vec![
            rat(0, 1),
            rat(1, 2),
            rat(1, 24),
            rat(25, 144),
            rat(-11, 17280),
            rat(70591, 518400),
            rat(-774601, 24192000),
            rat(2215989011, 15240960000),
        ]
    }

    #[test]
    fn u_series() {
        let c = CfEquation::new(3, 5);
        assert_eq!(
            c.u.coeffs(),
            &[rat(0, 1), rat(1, 1), rat(-2, 1), rat(3, 1), rat(-4, 1)]
        );
    }

    #[test]
    fn lambda_coefficients() {
        let l = lambda_heun(8).unwrap();
        assert_eq!(as_rationals(&l, 8), expected_lambda());
        assert_eq!(l.coeff(0), Some(rat(0, 1)));
    }

    #[test]
    fn lambda_squared_is_h() {
        let l = lambda_heun(9).unwrap();
        let h = &l * &l;
        let expected = [
            rat(1, 4),
            rat(1, 24),
            rat(101, 576),
            rat(239, 17280),
            rat(19153, 115200),
            rat(-1516283, 72576000),
            rat(23167560743, 121927680000),
        ];
        for (i, c) in expected.iter().enumerate() {
            assert_eq!(h.coeff(i as i64 + 2).as_ref(), Some(c), "t^{}", i + 2);
        }
    }

    #[test]
    fn low_orders_are_prefixes() {
        let full = lambda_heun(8).unwrap();
        for k in 2..8 {
            assert_eq!(lambda_heun(k).unwrap(), full.with_precision(k as i64));
        }
        assert!(lambda_heun(1).is_err());
    }

    #[test]
    fn depth_stability() {
        let a = CfEquation::new(9, 16).solve(7).unwrap();
        let b = CfEquation::new(13, 16).solve(7).unwrap();
        assert_eq!(a, b);
        assert!(CfEquation::new(11, 16).certifies(&a, 7).unwrap());
    }

    #[test]
    fn shallow_truncation_is_rejected() {
        // Two levels per branch cannot see t^6.
        let shallow = CfEquation::new(2, 16).solve(7).unwrap();
        let deep = CfEquation::new(9, 16);
        assert!(!deep.certifies(&shallow, 7).unwrap());
    }
}
