use serde::{Deserialize, Serialize};

use crate::diffop::{window_det, DiffOperator};
use crate::error::{Error, Result};
use crate::rings::format_rational;
use crate::series::{EpsPoly, TruncSeries};
use crate::weierstrass::{weierstrass_iterative, WeierstrassData};

/// Record of the window growth behind a regularized determinant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationReport {
    /// Symmetric windows `(−M, N)` in the order they were tried.
    pub windows: Vec<(i64, i64)>,
    /// For each window, the coefficients of `w_1 … w_n` as `a/b` strings.
    pub snapshots: Vec<Vec<Vec<String>>>,
    pub converged: bool,
    pub eps_bound: usize,
    pub order: usize,
    /// Number of leading t-coefficients on which the last two snapshots
    /// agree.
    pub certified_order: usize,
}

fn snapshot(w: &[TruncSeries]) -> Vec<Vec<String>> {
    w.iter()
        .map(|s| s.coeffs().iter().map(format_rational).collect())
        .collect()
}

fn agreement(a: &[TruncSeries], b: &[TruncSeries]) -> usize {
    let order = a.first().map_or(0, TruncSeries::order);
    (0..order)
        .find(|&k| a.iter().zip(b).any(|(x, y)| x.coeff(k) != y.coeff(k)))
        .unwrap_or(order)
}

/// Weierstrass data of `det B_{−M,M}(ε)` at `ε` bound `n(K+1)`.
#[cfg(test)]
pub(crate) fn window_weierstrass(d: &DiffOperator, m: i64, order: usize) -> Result<WeierstrassData> {
    window_weierstrass_at(d, m, order, d.order() * (order + 1))
}

fn window_weierstrass_at(d: &DiffOperator, m: i64, order: usize, bound: usize) -> Result<WeierstrassData> {
    let q = window_det(d, -m, m, bound, order)?.value;
    weierstrass_iterative(&q, d.order())
}

pub(crate) fn start_window(d: &DiffOperator) -> i64 {
    d.max_abs_exponent() + d.order() as i64 + 2
}

pub(crate) fn window_step(d: &DiffOperator) -> i64 {
    (d.max_derivative() as i64).max(2)
}

pub(crate) fn safety_bound(d: &DiffOperator, order: usize) -> i64 {
    let m = d.max_derivative() as i64;
    order as i64 * m * (m + 1) + d.max_abs_exponent() + d.order() as i64 + 4
}

/// `w(ε) = lim det B_{−M,N}`'s Weierstrass polynomial, taken once two
/// consecutive symmetric windows agree through `t^{K−1}`. The prefactor of
/// `d` is ignored.
pub fn regularized_wpoly(d: &DiffOperator, order: usize) -> Result<(EpsPoly, StabilizationReport)> {
    regularized_wpoly_with(d, order, None)
}

/// As [`regularized_wpoly`], optionally keeping more powers of `ε` than the
/// default `n(K+1)`. Smaller bounds are rejected.
pub fn regularized_wpoly_with(
    d: &DiffOperator,
    order: usize,
    eps_bound: Option<usize>,
) -> Result<(EpsPoly, StabilizationReport)> {
    if order == 0 {
        return Err(Error::InvalidInput("truncation order must be at least 1".into()));
    }
    let n = d.order();
    let eps_bound = match eps_bound {
        None => n * (order + 1),
        Some(e) if e >= n * (order + 1) => e,
        Some(e) => {
            return Err(Error::InvalidInput(format!(
                "eps bound {e} is below n(K+1) = {}",
                n * (order + 1)
            )))
        }
    };
    let bound = safety_bound(d, order);
    let mut report = StabilizationReport {
        windows: Vec::new(),
        snapshots: Vec::new(),
        converged: false,
        eps_bound,
        order,
        certified_order: 0,
    };
    let mut prev: Option<WeierstrassData> = None;
    let mut m = start_window(d);
    loop {
        let cur = window_weierstrass_at(d, m, order, eps_bound)?;
        report.windows.push((-m, m));
        report.snapshots.push(snapshot(&cur.w));
        if let Some(p) = &prev {
            report.certified_order = agreement(&p.w, &cur.w);
            if report.certified_order == order {
                report.converged = true;
                return Ok((cur.polynomial(n), report));
            }
        }
        prev = Some(cur);
        if m >= bound {
            return Err(Error::NonConvergence { bound });
        }
        m = (m + window_step(d)).min(bound);
    }
}

/// `L(D) = (−1)^n w(0)` with its certification record.
#[derive(Clone, Debug, PartialEq)]
pub struct Ldet {
    pub value: TruncSeries,
    pub w: EpsPoly,
    pub report: StabilizationReport,
}

impl Ldet {
    pub fn certified_order(&self) -> usize {
        self.report.certified_order
    }
}

pub fn ldet(d: &DiffOperator, order: usize) -> Result<Ldet> {
    ldet_with(d, order, None)
}

pub fn ldet_with(d: &DiffOperator, order: usize, eps_bound: Option<usize>) -> Result<Ldet> {
    let (w, report) = regularized_wpoly_with(d, order, eps_bound)?;
    let c = w.coeff(0);
    let value = if d.order() % 2 == 0 { c.clone() } else { -c };
    Ok(Ldet { value, w, report })
}
