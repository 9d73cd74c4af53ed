//! Formal Weierstrass preparation `q(ε) = w(ε)·q_inv(ε)` with
//! `w = ε^n − w_1 ε^{n−1} + … + (−1)^n w_n`, every `w_i` divisible by `t`,
//! and `q_inv` a unit. Two independent algorithms are provided.
//!
//! The input is treated as an exact polynomial of degree at most its
//! `ε` bound `E`; `q_inv` is the exact cofactor cut at `ε^E`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rings::{rat, Rational};
use crate::series::{series_inv, EpsLaurent, EpsPoly, TruncSeries};

#[derive(Clone, Debug, PartialEq)]
pub struct WeierstrassData {
    /// `w_1, …, w_n`.
    pub w: Vec<TruncSeries>,
    pub q_inv: EpsPoly,
}

impl WeierstrassData {
    /// The monic polynomial `ε^n − w_1 ε^{n−1} + … + (−1)^n w_n`.
    pub fn polynomial(&self, bound: usize) -> EpsPoly {
        let n = self.w.len();
        let order = self.q_inv.order();
        let mut coeffs = vec![TruncSeries::zero(order); n + 1];
        coeffs[n] = TruncSeries::one(order);
        for (i, wi) in self.w.iter().enumerate() {
            let i = i + 1;
            coeffs[n - i] = if i % 2 == 0 { wi.clone() } else { -wi };
        }
        EpsPoly::new(coeffs, bound, order)
    }

    /// `w(0) = (−1)^n w_n`.
    pub fn constant_term(&self) -> TruncSeries {
        self.polynomial(self.w.len()).coeff(0).clone()
    }
}

/// Checks the shape and divides by `c = q_n(0)`. Returns the normalized
/// polynomial and `c`.
fn normalize(q: &EpsPoly, n: usize) -> Result<(EpsPoly, Rational)> {
    if q.bound() < n {
        return Err(Error::NotWeierstrassReady(format!(
            "ε bound {} is below the degree n = {n}",
            q.bound()
        )));
    }
    if let Some(j) = (0..n).find(|&j| !q.coeff(j).constant_term().is_zero()) {
        return Err(Error::NotWeierstrassReady(format!(
            "coefficient of ε^{j} is not divisible by t"
        )));
    }
    let c = q.coeff(n).constant_term().clone();
    if c.is_zero() {
        return Err(Error::NotWeierstrassReady(format!(
            "coefficient of ε^{n} is not a unit"
        )));
    }
    let scale = TruncSeries::constant(c.recip(), q.order());
    Ok((q.scale(&scale), c))
}

/// Working `ε` range for the cofactor so that its first `E + 1`
/// coefficients are exact at t-order `K`.
fn extended_bound(q: &EpsPoly, n: usize) -> usize {
    q.bound() + n * q.order()
}

/// Fixed-point iteration: each round recomputes the cofactor from the
/// current `w`, then `w` from the cofactor, gaining one power of `t`.
pub fn weierstrass_iterative(q: &EpsPoly, n: usize) -> Result<WeierstrassData> {
    let (qn, c) = normalize(q, n)?;
    let order = q.order();
    let e = q.bound();
    let hi = extended_bound(q, n);
    let qc = |r: usize| -> TruncSeries {
        if r <= e {
            qn.coeff(r).clone()
        } else {
            TruncSeries::zero(order)
        }
    };
    let zero = TruncSeries::zero(order);
    // w(ε) = Σ_{s ≤ n} big_w[s] ε^s with big_w[n] = 1.
    let mut big_w = vec![zero.clone(); n];
    let mut v = vec![zero.clone(); hi + 1];
    for _ in 0..order {
        let old = v.clone();
        for (i, slot) in v.iter_mut().enumerate() {
            let mut acc = qc(n + i);
            for (s, ws) in big_w.iter().enumerate() {
                let idx = n + i - s;
                if idx <= hi && !ws.is_zero() && !old[idx].is_zero() {
                    acc = &acc - &(ws * &old[idx]);
                }
            }
            *slot = acc;
        }
        let v0_inv = series_inv(&v[0])?;
        for r in 0..n {
            let mut acc = qc(r);
            for s in 0..r {
                acc = &acc - &(&big_w[s] * &v[r - s]);
            }
            big_w[r] = &acc * &v0_inv;
        }
    }
    let w = (1..=n)
        .map(|i| {
            let x = &big_w[n - i];
            if i % 2 == 0 {
                x.clone()
            } else {
                -x
            }
        })
        .collect();
    let cs = TruncSeries::constant(c, order);
    let q_inv = EpsPoly::new(v, e, order).scale(&cs);
    Ok(WeierstrassData { w, q_inv })
}

/// Splitting of `log(q/ε^n)` into its principal and polynomial parts:
/// `ε^{−n} q = q_+ · q_−` with `q_− = exp(L_{<0} log(q/ε^n))` and
/// `w = ε^n q_−`.
pub fn weierstrass_split(q: &EpsPoly, n: usize) -> Result<WeierstrassData> {
    let (qn, c) = normalize(q, n)?;
    let order = q.order();
    let e = q.bound();
    let hi = extended_bound(q, n);
    let ni = n as i64;

    // q/ε^n = P + N with P the ε-power-series part and N the principal part.
    let big_p = EpsPoly::new(qn.coeffs()[n..].to_vec(), hi, order);
    let small_n = EpsLaurent::new(-ni, qn.coeffs()[..n].to_vec(), order, n)?;
    let p_inv = EpsLaurent::from_poly(&big_p.inv()?);
    let g = p_inv.mul_window(&small_n, -ni, hi as i64);

    // log(1 + g) = Σ (−1)^{k+1} g^k / k; g is t-small so K − 1 terms suffice.
    let depth = order.saturating_sub(1) as i64;
    let mut log = EpsLaurent::zero(order, n * order);
    let mut power = EpsLaurent::new(0, vec![TruncSeries::one(order)], order, 0)?;
    for k in 1..=depth {
        let top = e as i64 + (depth - k) * ni;
        power = power.mul_window(&g, -k * ni, top);
        if power.is_zero() {
            break;
        }
        let sign = if k % 2 == 1 { 1 } else { -1 };
        log = &log + &power.scale(&rat(sign, k));
    }

    let low = -depth.max(1) * ni;
    let neg = log.window(low, -1);
    let pos = log.window(0, e as i64);
    let q_minus = neg.exp_window(low, 0)?;
    if q_minus.pole_order() > n {
        return Err(Error::NotWeierstrassReady(format!(
            "q_− has a pole of order {} > {n}",
            q_minus.pole_order()
        )));
    }
    let w = (1..=n)
        .map(|i| {
            let x = q_minus.coeff(-(i as i64));
            if i % 2 == 0 {
                x
            } else {
                -&x
            }
        })
        .collect();

    let exp_pos = pos.exp_window(0, e as i64)?;
    let exp_pos = EpsPoly::new((0..=e as i64).map(|j| exp_pos.coeff(j)).collect(), e, order);
    let q_plus = &big_p.with_bound(e) * &exp_pos;
    let q_inv = q_plus.scale(&TruncSeries::constant(c, order));
    Ok(WeierstrassData { w, q_inv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::catalog::d0;
    use crate::diffop::window_det;
    use proptest::prelude::*;

    fn t(order: usize) -> TruncSeries {
        TruncSeries::monomial(rat(1, 1), 1, order)
    }

    fn c(x: i64, order: usize) -> TruncSeries {
        TruncSeries::constant(rat(x, 1), order)
    }

    fn both(q: &EpsPoly, n: usize) -> WeierstrassData {
        let a = weierstrass_iterative(q, n).unwrap();
        let b = weierstrass_split(q, n).unwrap();
        assert_eq!(a, b);
        a
    }

    #[test]
    fn already_monic() {
        for n in 0..3 {
            let q = EpsPoly::monomial(c(1, 4), n, 6);
            let r = both(&q, n);
            assert!(r.w.iter().all(TruncSeries::is_zero));
            assert_eq!(r.q_inv, EpsPoly::one(6, 4));
        }
    }

    #[test]
    fn visible_factorization() {
        let k = 5;
        // (ε − t)(1 + ε) = −t + (1 − t)ε + ε²
        let q = EpsPoly::new(vec![-&t(k), &c(1, k) - &t(k), c(1, k)], 6, k);
        let r = both(&q, 1);
        assert_eq!(r.w, vec![t(k)]);
        assert_eq!(r.q_inv, EpsPoly::new(vec![c(1, k), c(1, k)], 6, k));
    }

    #[test]
    fn unit_normalization_is_multiplied_back() {
        let k = 4;
        // 3(ε − t)
        let q = EpsPoly::new(vec![t(k).scale(&rat(-3, 1)), c(3, k)], 5, k);
        let r = both(&q, 1);
        assert_eq!(r.w, vec![t(k)]);
        assert_eq!(r.q_inv, EpsPoly::constant(c(3, k), 5));
    }

    #[test]
    fn rejects_unprepared_input() {
        let q = EpsPoly::new(vec![c(1, 3), c(1, 3)], 4, 3);
        assert!(matches!(weierstrass_split(&q, 1), Err(Error::NotWeierstrassReady(_))));
        assert!(matches!(weierstrass_iterative(&q, 1), Err(Error::NotWeierstrassReady(_))));
        let q = EpsPoly::new(vec![t(3), t(3)], 4, 3);
        assert!(matches!(weierstrass_split(&q, 1), Err(Error::NotWeierstrassReady(_))));
    }

    #[test]
    fn d0_window_gives_minus_quarter() {
        let k = 3;
        let q = window_det(&d0(), -6, 6, 2 * (k + 1), k).unwrap().value;
        let r = both(&q, 2);
        assert_eq!(r.w[1], TruncSeries::new(vec![rat(0, 1), rat(0, 1), rat(-1, 4)]));
    }

    fn series(v: Vec<i64>) -> TruncSeries {
        TruncSeries::new(v.into_iter().map(|x| rat(x, 1)).collect())
    }

    /// Admissible input: first n coefficients divisible by t, q_n(0) ≠ 0.
    fn arb_input() -> impl Strategy<Value = (EpsPoly, usize)> {
        (1usize..=3, 1usize..=8).prop_flat_map(|(n, k)| {
            let e = n * (k + 1);
            (
                prop::collection::vec(prop::collection::vec(-4i64..5, k), e + 1),
                prop_oneof![Just(1i64), Just(-2), Just(3)],
            )
                .prop_map(move |(rows, lead)| {
                    let coeffs = rows
                        .into_iter()
                        .enumerate()
                        .map(|(j, mut r)| {
                            if j < n {
                                r[0] = 0;
                            } else if j == n {
                                r[0] = lead;
                            }
                            series(r)
                        })
                        .collect();
                    (EpsPoly::new(coeffs, e, k), n)
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn algorithms_agree_and_reconstruct((q, n) in arb_input()) {
            let a = weierstrass_iterative(&q, n).unwrap();
            let b = weierstrass_split(&q, n).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(&a.polynomial(q.bound()) * &a.q_inv, q.clone());
            prop_assert!(a.w.iter().all(|x| x.constant_term().is_zero()));
        }

        #[test]
        fn uniqueness((q, n) in arb_input()) {
            let k = q.order();
            let base = weierstrass_iterative(&q, n).unwrap();
            // A polynomial cofactor keeps every product exact below the bound.
            let deg = q.bound() - n - 1;
            let poly_inv = base.q_inv.with_bound(deg).with_bound(q.bound());
            let bump = EpsPoly::new(vec![c(1, k), t(k)], q.bound(), k);
            let perturbed = &poly_inv * &bump;
            let q2 = &base.polynomial(q.bound()) * &perturbed;
            for f in [weierstrass_iterative, weierstrass_split] {
                let r = f(&q2, n).unwrap();
                prop_assert_eq!(&r.w, &base.w);
                prop_assert_eq!(&r.q_inv, &perturbed);
            }
        }
    }
}
