//! Differential operators `c(t)·[(θ−l_1)⋯(θ−l_n) + Σ t_{i,k}(t) x^i ∂^k]`
//! with `θ = x∂`, their matrices on the monomials `x^{j+ε}`, and their
//! p-determinants.

mod detp;
mod expr;
mod matrix;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rings::{format_rational, RatFunc, RatFuncRepr};
use crate::series::TruncSeries;

pub use detp::{detp, DetP};
pub use expr::parse_ratfunc;
pub use matrix::{falling_factorial, matrix_entry, window_det, WindowDet};

/// One perturbation coefficient `t_{i,k}(t) = num/den` of `x^i ∂^k`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct CoeffSpec {
    pub i: usize,
    pub k: usize,
    pub num: Vec<i64>,
    pub den: Vec<i64>,
}

/// On-disk JSON form of an operator.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct OperatorFile {
    pub n: usize,
    pub l: Vec<i64>,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefactor: Option<RatFuncRepr>,
    #[serde(default)]
    pub coeffs: Vec<CoeffSpec>,
}

type SeriesTable = Arc<BTreeMap<(usize, usize), TruncSeries>>;

pub struct DiffOperator {
    n: usize,
    l: Vec<i64>,
    m: usize,
    coeffs: BTreeMap<(usize, usize), RatFunc>,
    prefactor: RatFunc,
    series: Mutex<HashMap<usize, SeriesTable>>,
}

impl DiffOperator {
    /// Validates and builds an operator. `l` is sorted here.
    pub fn new(
        l: Vec<i64>,
        m: usize,
        coeffs: BTreeMap<(usize, usize), RatFunc>,
        prefactor: RatFunc,
    ) -> Result<Self> {
        let mut l = l;
        l.sort_unstable();
        if l.is_empty() {
            return Err(Error::InvalidInput("operator order n must be at least 1".into()));
        }
        if prefactor.value_at_zero().is_none_or(|c| c.is_zero()) {
            return Err(Error::NonInvertibleDenominator {
                what: format!("prefactor {prefactor} (needs c(0) finite and nonzero)"),
            });
        }
        let mut kept = BTreeMap::new();
        for (&(i, k), f) in &coeffs {
            if k > m {
                return Err(Error::Arity { i, k, m });
            }
            let c0 = f.value_at_zero().ok_or_else(|| Error::NonInvertibleDenominator {
                what: format!("t[{i},{k}] = {f}"),
            })?;
            if i <= k && !c0.is_zero() {
                return Err(Error::SmallnessViolation {
                    i,
                    k,
                    constant: format_rational(&c0),
                });
            }
            if !f.num.is_zero() {
                kept.insert((i, k), f.clone());
            }
        }
        Ok(DiffOperator {
            n: l.len(),
            l,
            m,
            coeffs: kept,
            prefactor,
            series: Mutex::new(HashMap::new()),
        })
    }

    /// `x^n ∂^n`-free operator `(θ−l_1)⋯(θ−l_n)`.
    pub fn unperturbed(l: Vec<i64>) -> Result<Self> {
        DiffOperator::new(l, 0, BTreeMap::new(), RatFunc::one())
    }

    pub fn from_file(f: &OperatorFile) -> Result<Self> {
        if f.l.len() != f.n {
            return Err(Error::InvalidInput(format!(
                "n = {} but {} exponents given",
                f.n,
                f.l.len()
            )));
        }
        if f.l.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidInput("exponents l must be sorted".into()));
        }
        let mut coeffs = BTreeMap::new();
        for c in &f.coeffs {
            if c.den.iter().all(|&d| d == 0) {
                return Err(Error::InvalidInput(format!("t[{},{}] has zero denominator", c.i, c.k)));
            }
            if coeffs
                .insert((c.i, c.k), RatFunc::from_ints(&c.num, &c.den))
                .is_some()
            {
                return Err(Error::InvalidInput(format!("t[{},{}] given twice", c.i, c.k)));
            }
        }
        let prefactor = f
            .prefactor
            .as_ref()
            .map(RatFunc::from_repr)
            .unwrap_or_else(RatFunc::one);
        DiffOperator::new(f.l.clone(), f.m, coeffs, prefactor)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let f: OperatorFile = serde_json::from_str(text)?;
        DiffOperator::from_file(&f)
    }

    pub fn to_file(&self) -> OperatorFile {
        OperatorFile {
            n: self.n,
            l: self.l.clone(),
            m: self.m,
            prefactor: (!self.prefactor.is_one()).then(|| self.prefactor.to_repr()),
            coeffs: self
                .coeffs
                .iter()
                .map(|(&(i, k), f)| {
                    let s = f.to_repr();
                    CoeffSpec { i, k, num: s.num, den: s.den }
                })
                .collect(),
        }
    }

    /// Deterministic serialization used for hashing.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("operator serializes")
    }

    pub fn with_prefactor(&self, prefactor: RatFunc) -> Result<Self> {
        DiffOperator::new(self.l.clone(), self.m, self.coeffs.clone(), prefactor)
    }

    /// The same perturbation data with prefactor 1.
    pub fn normalized(&self) -> Self {
        self.with_prefactor(RatFunc::one())
            .expect("prefactor 1 is admissible")
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn exponents(&self) -> &[i64] {
        &self.l
    }

    pub fn max_derivative(&self) -> usize {
        self.m
    }

    pub fn prefactor(&self) -> &RatFunc {
        &self.prefactor
    }

    pub fn coefficients(&self) -> &BTreeMap<(usize, usize), RatFunc> {
        &self.coeffs
    }

    pub fn coefficient(&self, i: usize, k: usize) -> Option<&RatFunc> {
        self.coeffs.get(&(i, k))
    }

    pub fn is_unperturbed(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `i - k` over nonzero coefficients: entries `b_{ij}` vanish for
    /// `i - j` above it.
    pub fn lower_bandwidth(&self) -> i64 {
        self.coeffs
            .keys()
            .map(|&(i, k)| i as i64 - k as i64)
            .max()
            .unwrap_or(0)
            .max(0)
    }

    /// Largest `k - i`: entries vanish for `j - i` above it.
    pub fn upper_bandwidth(&self) -> i64 {
        self.coeffs
            .keys()
            .map(|&(i, k)| k as i64 - i as i64)
            .max()
            .unwrap_or(0)
            .max(0)
    }

    pub fn max_abs_exponent(&self) -> i64 {
        self.l.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    /// Taylor expansions of all coefficients to order `K`, computed once.
    pub fn coefficient_series(&self, order: usize) -> Result<SeriesTable> {
        let mut cache = self.series.lock().expect("series cache poisoned");
        if let Some(t) = cache.get(&order) {
            return Ok(t.clone());
        }
        let mut table = BTreeMap::new();
        for (&key, f) in &self.coeffs {
            table.insert(key, TruncSeries::from_ratfunc(f, order)?);
        }
        let table = Arc::new(table);
        cache.insert(order, table.clone());
        Ok(table)
    }
}

impl Clone for DiffOperator {
    fn clone(&self) -> Self {
        DiffOperator {
            n: self.n,
            l: self.l.clone(),
            m: self.m,
            coeffs: self.coeffs.clone(),
            prefactor: self.prefactor.clone(),
            series: Mutex::new(HashMap::new()),
        }
    }
}

impl PartialEq for DiffOperator {
    fn eq(&self, o: &Self) -> bool {
        self.l == o.l && self.m == o.m && self.coeffs == o.coeffs && self.prefactor == o.prefactor
    }
}

impl fmt::Debug for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiffOperator")
            .field("l", &self.l)
            .field("m", &self.m)
            .field("coeffs", &self.coeffs)
            .field("prefactor", &self.prefactor)
            .finish()
    }
}

/// The Heun and elliptic operators that the pipelines are checked against.
pub mod catalog {
    use super::*;

    /// `(θ+1)θ − (x³∂² + 3x²∂ + x + t x∂² + t∂)/(1+t)`, the Heun operator
    /// rescaled to canonical form.
    pub const D0: &str = r#"{
        "n": 2, "l": [-1, 0], "m": 2,
        "coeffs": [
            {"i": 3, "k": 2, "num": [-1], "den": [1, 1]},
            {"i": 2, "k": 1, "num": [-3], "den": [1, 1]},
            {"i": 1, "k": 0, "num": [-1], "den": [1, 1]},
            {"i": 1, "k": 2, "num": [0, -1], "den": [1, 1]},
            {"i": 0, "k": 1, "num": [0, -1], "den": [1, 1]}
        ]
    }"#;

    /// Negated Legendre-family operator with exponents `−1, 1`.
    pub const D1_NEG: &str = r#"{
        "n": 2, "l": [-1, 1], "m": 2,
        "coeffs": [
            {"i": 3, "k": 2, "num": [-1], "den": [1]},
            {"i": 2, "k": 1, "num": [-3], "den": [2]},
            {"i": 2, "k": 2, "num": [0, 1], "den": [1]},
            {"i": 1, "k": 2, "num": [0, -1], "den": [1]},
            {"i": 1, "k": 1, "num": [0, 1], "den": [1]},
            {"i": 0, "k": 1, "num": [0, -1], "den": [2]}
        ]
    }"#;

    pub fn d0() -> DiffOperator {
        DiffOperator::parse(D0).unwrap()
    }

    /// The Heun operator itself: `d0` times `−(1+t)`.
    pub fn intro() -> DiffOperator {
        d0().with_prefactor(RatFunc::from_ints(&[-1, -1], &[1])).unwrap()
    }

    pub fn d1_neg() -> DiffOperator {
        DiffOperator::parse(D1_NEG).unwrap()
    }

    pub fn d1() -> DiffOperator {
        d1_neg().with_prefactor(RatFunc::from_ints(&[-1], &[1])).unwrap()
    }
}
