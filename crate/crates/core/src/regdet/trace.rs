use std::collections::{BTreeMap, HashMap};

use crate::diffop::{matrix_entry, DiffOperator};
use crate::error::{Error, Result};
use crate::rings::rat;
use crate::series::{EpsLaurent, EpsPoly, TruncSeries};

use super::teps::{t_eps, RationalFunctionEps};

type Poly = Vec<TruncSeries>;

fn poly_mul(a: &[TruncSeries], b: &[TruncSeries], order: usize) -> Poly {
    let mut out = vec![TruncSeries::zero(order); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
    }
    out
}

fn valuation(p: &[TruncSeries], order: usize) -> usize {
    p.iter().filter_map(TruncSeries::valuation).min().unwrap_or(order)
}

/// Entry `ā_{ij} = b_{ij}/b⁰_{jj} − δ_{ij}`, where `b⁰_{jj} = Π(j+ε−l_k)`,
/// as a numerator with its t-valuation; the denominator is implied by `j`.
struct Entries<'a> {
    d: &'a DiffOperator,
    order: usize,
    degree: usize,
    cache: HashMap<(i64, i64), Option<(Poly, usize)>>,
}

impl Entries<'_> {
    fn get(&mut self, i: i64, j: i64) -> Result<Option<(Poly, usize)>> {
        if let Some(e) = self.cache.get(&(i, j)) {
            return Ok(e.clone());
        }
        let mut e = matrix_entry(self.d, i, j, self.degree, self.order)?;
        if i == j {
            let diag = matrix_entry(&DiffOperator::unperturbed(self.d.exponents().to_vec())?, j, j, self.degree, self.order)?;
            e = &e - &diag;
        }
        let value = (!e.is_zero()).then(|| {
            let p = e.coeffs().to_vec();
            let v = valuation(&p, self.order);
            (p, v)
        });
        self.cache.insert((i, j), value.clone());
        Ok(value)
    }
}

struct Walker<'a> {
    entries: Entries<'a>,
    top: i64,
    up: i64,
    down: i64,
    cap: usize,
    order: usize,
    exponents: Vec<i64>,
    groups: BTreeMap<Vec<(i64, usize)>, Poly>,
}

impl Walker<'_> {
    /// Powers of `t` still needed to climb back to the top index.
    fn climb_cost(&self, pos: i64) -> usize {
        if pos == self.top {
            0
        } else if self.up == 0 {
            usize::MAX / 2
        } else {
            ((self.top - pos) as usize).div_ceil(self.up as usize)
        }
    }

    fn dfs(
        &mut self,
        pos: i64,
        len: usize,
        occ: usize,
        num: &Poly,
        poles: &BTreeMap<i64, usize>,
    ) -> Result<()> {
        for j in (pos - self.down)..=(pos + self.up).min(self.top) {
            let Some((entry, _)) = self.entries.get(pos, j)? else {
                continue;
            };
            let next = poly_mul(num, &entry, self.order);
            let v = valuation(&next, self.order);
            if v + self.climb_cost(j) >= self.order {
                continue;
            }
            if len + 1 > self.cap {
                return Err(Error::InternalBound(format!(
                    "closed walks longer than {} still contribute below t^{}",
                    self.cap, self.order
                )));
            }
            let mut next_poles = poles.clone();
            for l in &self.exponents {
                *next_poles.entry(l - j).or_insert(0) += 1;
            }
            let next_occ = occ + usize::from(j == self.top);
            if j == self.top {
                // A closed walk of length k from the top, which it visits `occ`
                // times before closing, stands for k/occ index sequences; with
                // the 1/k of the log series this leaves (−1)^{k−1}/occ.
                let sign = if (len + 1) % 2 == 1 { 1 } else { -1 };
                let w: Poly = next.iter().map(|c| c.scale(&rat(sign, occ as i64))).collect();
                let key: Vec<(i64, usize)> = next_poles.iter().map(|(&c, &m)| (c, m)).collect();
                let slot = self.groups.entry(key).or_default();
                if slot.len() < w.len() {
                    slot.resize(w.len(), TruncSeries::zero(self.order));
                }
                for (s, x) in slot.iter_mut().zip(&w) {
                    *s = &*s + x;
                }
            }
            self.dfs(j, len + 1, next_occ, &next, &next_poles)?;
        }
        Ok(())
    }
}

/// `w(ε) = ε^n exp T_ε(lim tr(log A_{−N,−b} − log A_{−N,−b−1}))` with the
/// cut at index `−b`, `b > max |l_i|`.
pub fn w_via_trace_at(d: &DiffOperator, order: usize, b: i64) -> Result<EpsPoly> {
    if b <= d.max_abs_exponent() {
        return Err(Error::InvalidInput(format!(
            "cut b = {b} must exceed max |l_i| = {}",
            d.max_abs_exponent()
        )));
    }
    let n = d.order();
    let m = d.max_derivative();
    let mut walker = Walker {
        entries: Entries {
            d,
            order,
            degree: n.max(m),
            cache: HashMap::new(),
        },
        top: -b,
        up: d.upper_bandwidth(),
        down: d.lower_bandwidth(),
        cap: order * (m + 1),
        order,
        exponents: d.exponents().to_vec(),
        groups: BTreeMap::new(),
    };
    let one = vec![TruncSeries::one(order)];
    walker.dfs(-b, 0, 1, &one, &BTreeMap::new())?;

    let mut total = EpsLaurent::zero(order, 0);
    for (poles, num) in std::mem::take(&mut walker.groups) {
        let f = RationalFunctionEps::from_factored(num, poles.into_iter().collect(), order);
        total = &total + &t_eps(&f);
    }
    let lowest = total.degree_range().map_or(0, |(lo, _)| lo);
    let span = lowest * (order as i64 - 1).max(1);
    let e = total.exp_window(span.min(-(n as i64)), 0)?;
    if e.pole_order() > n {
        return Err(Error::InternalBound(format!(
            "exp T_ε has a pole of order {} > n = {n}",
            e.pole_order()
        )));
    }
    let coeffs = (0..=n as i64).map(|s| e.coeff(s - n as i64)).collect();
    Ok(EpsPoly::new(coeffs, n, order))
}

/// The trace route with the default cut `b = max |l_i| + 1`.
pub fn w_via_trace(d: &DiffOperator, order: usize) -> Result<EpsPoly> {
    w_via_trace_at(d, order, d.max_abs_exponent() + 1)
}
