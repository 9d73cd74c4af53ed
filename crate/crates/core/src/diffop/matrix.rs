use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::DiffOperator;
use crate::error::Result;
use crate::linalg::berkowitz_det;
use crate::rings::Rational;
use crate::series::{EpsPoly, TruncSeries};

/// `(j+ε)(j+ε−1)⋯(j+ε−k+1)` as coefficients in `ε`, lowest first.
pub fn falling_factorial(j: i64, k: usize) -> Vec<Rational> {
    let mut poly = vec![Rational::one()];
    for r in 0..k as i64 {
        let c = Rational::from_integer(BigInt::from(j - r));
        let mut next = vec![Rational::zero(); poly.len() + 1];
        for (d, a) in poly.iter().enumerate() {
            next[d] += a * &c;
            next[d + 1] += a;
        }
        poly = next;
    }
    poly
}

/// `Π_k (i + ε − l_k)`.
fn diagonal_symbol(l: &[i64], i: i64) -> Vec<Rational> {
    let mut poly = vec![Rational::one()];
    for &lk in l {
        let c = Rational::from_integer(BigInt::from(i - lk));
        let mut next = vec![Rational::zero(); poly.len() + 1];
        for (d, a) in poly.iter().enumerate() {
            next[d] += a * &c;
            next[d + 1] += a;
        }
        poly = next;
    }
    poly
}

/// The coefficient `b_{ij}(ε)` of `x^{i+ε}` in `D x^{j+ε}`, without the
/// prefactor, truncated to `ε^E` and `t^K`.
pub fn matrix_entry(d: &DiffOperator, i: i64, j: i64, bound: usize, order: usize) -> Result<EpsPoly> {
    let table = d.coefficient_series(order)?;
    let mut coeffs = vec![TruncSeries::zero(order); bound + 1];
    if i == j {
        for (e, c) in diagonal_symbol(d.exponents(), i).iter().enumerate().take(bound + 1) {
            coeffs[e] = TruncSeries::constant(c.clone(), order);
        }
    }
    for k in (j - i).max(0)..=d.max_derivative() as i64 {
        let a = k + i - j;
        let Some(s) = table.get(&(a as usize, k as usize)) else {
            continue;
        };
        for (e, c) in falling_factorial(j, k as usize).iter().enumerate().take(bound + 1) {
            if !c.is_zero() {
                coeffs[e] = &coeffs[e] + &s.scale(c);
            }
        }
    }
    Ok(EpsPoly::new(coeffs, bound, order))
}

/// `det B_{a,b}(ε)`: the determinant of the block of rows and columns
/// `a..=b`.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowDet {
    pub a: i64,
    pub b: i64,
    pub value: EpsPoly,
}

/// Window determinant by unit-pivot elimination of every index outside the
/// exponent set, followed by Berkowitz on the remaining core.
pub fn window_det(d: &DiffOperator, a: i64, b: i64, bound: usize, order: usize) -> Result<WindowDet> {
    assert!(a <= b, "empty window {a}..={b}");
    let lo = d.lower_bandwidth();
    let hi = d.upper_bandwidth();
    let mut rows: BTreeMap<i64, BTreeMap<i64, EpsPoly>> = BTreeMap::new();
    let mut cols: BTreeMap<i64, BTreeSet<i64>> = BTreeMap::new();
    for i in a..=b {
        let mut row = BTreeMap::new();
        for j in (i - lo).max(a)..=(i + hi).min(b) {
            let v = matrix_entry(d, i, j, bound, order)?;
            if !v.is_zero() {
                cols.entry(j).or_default().insert(i);
                row.insert(j, v);
            }
        }
        rows.insert(i, row);
    }

    let core: BTreeSet<i64> = d
        .exponents()
        .iter()
        .copied()
        .filter(|x| (a..=b).contains(x))
        .collect();
    let mut det = EpsPoly::one(bound, order);
    for r in (a..=b).filter(|r| !core.contains(r)) {
        let mut pivot_row = rows.remove(&r).expect("row present");
        let pivot = pivot_row
            .remove(&r)
            .expect("diagonal entry has nonzero constant term");
        let inv = pivot.inv().expect("non-exponent diagonal is a unit");
        det = &det * &pivot;
        for c in pivot_row.keys() {
            if let Some(s) = cols.get_mut(c) {
                s.remove(&r);
            }
        }
        let targets: Vec<i64> = cols
            .remove(&r)
            .unwrap_or_default()
            .into_iter()
            .filter(|&i| i != r)
            .collect();
        for i in targets {
            let row = rows.get_mut(&i).expect("row present");
            let f = &row.remove(&r).expect("indexed entry") * &inv;
            for (&c, v) in &pivot_row {
                let updated = match row.get(&c) {
                    Some(old) => old - &(&f * v),
                    None => -&(&f * v),
                };
                if updated.is_zero() {
                    row.remove(&c);
                    if let Some(s) = cols.get_mut(&c) {
                        s.remove(&i);
                    }
                } else {
                    row.insert(c, updated);
                    cols.entry(c).or_default().insert(i);
                }
            }
        }
    }

    if !core.is_empty() {
        let idx: Vec<i64> = core.iter().copied().collect();
        let m: Vec<Vec<EpsPoly>> = idx
            .iter()
            .map(|i| {
                idx.iter()
                    .map(|j| {
                        rows[i]
                            .get(j)
                            .cloned()
                            .unwrap_or_else(|| EpsPoly::zero(bound, order))
                    })
                    .collect()
            })
            .collect();
        det = &det * &berkowitz_det(&m);
    }
    Ok(WindowDet { a, b, value: det })
}
