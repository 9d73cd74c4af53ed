use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffop::{detp, DiffOperator};
use crate::error::{Error, Result};
use crate::regdet::ldet;
use crate::rings::{format_rational, is_prime, Fp, Rational};
use crate::series::TruncSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientStatus {
    Match,
    Mismatch,
    /// The prime divides the denominator of the rational coefficient.
    DenominatorBlocked,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientCheck {
    pub index: usize,
    pub status: CoefficientStatus,
    /// Coefficient of `Det_p` as a residue in `0..p`.
    pub detp: u64,
    /// `c(0)·L(D)` coefficient, exact and reduced.
    pub rational: String,
    pub reduced: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceReport {
    pub p: u64,
    /// `min(K, ⌈p/2⌉)`: coefficients below this index decide pass/fail.
    pub compared_order: usize,
    pub status: ReportStatus,
    /// Pass/fail of this prime does not count toward the overall verdict.
    pub informational: bool,
    pub skip_reason: Option<String>,
    /// `Det_p(D)` as printed by the detp pipeline.
    pub detp: Option<String>,
    pub coefficients: Vec<CoefficientCheck>,
    /// Indices below `compared_order` whose status is not `match`.
    pub mismatches: Vec<usize>,
    /// Indices at or beyond `compared_order` that match anyway.
    pub bonus_matches: Vec<usize>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CongruenceReport {
    fn skipped(p: u64, reason: String, informational: bool) -> Self {
        CongruenceReport {
            p,
            compared_order: 0,
            status: ReportStatus::Skipped,
            informational,
            skip_reason: Some(reason),
            detp: None,
            coefficients: Vec::new(),
            mismatches: Vec::new(),
            bonus_matches: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    /// A counted failure: not skipped, not informational, and red.
    pub fn is_failure(&self) -> bool {
        self.status == ReportStatus::Fail && !self.informational
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct VerifyOptions {
    /// Run `p = 2` too; its result is reported but never fails the run.
    pub force_p2: bool,
}

/// Compares `Det_p(D)` with `c(0)·L(D)` reduced mod `p`, where `c` is the
/// prefactor of `D`. Since `c(t)^p ≡ c(0) mod (p, t^p)`, this is exactly the
/// expected congruence through `t^{⌈p/2⌉−1}`.
pub fn verify_congruence(
    d: &DiffOperator,
    primes: &[u64],
    order: usize,
    opts: VerifyOptions,
) -> Result<Vec<CongruenceReport>> {
    if order == 0 {
        return Err(Error::InvalidInput("truncation order must be at least 1".into()));
    }
    let l = ldet(d, order)?;
    let c0 = d.prefactor().value_at_zero().expect("validated at construction");
    let certified = l.certified_order().min(order);
    let lifted = l.value.truncate(certified).scale(&c0);
    let mut primes = primes.to_vec();
    primes.sort_unstable();
    primes.dedup();
    Ok(primes
        .par_iter()
        .map(|&p| check_prime(d, p, &lifted, opts))
        .collect())
}

fn check_prime(d: &DiffOperator, p: u64, lifted: &TruncSeries, opts: VerifyOptions) -> CongruenceReport {
    let informational = p == 2;
    if !is_prime(p) {
        return CongruenceReport::skipped(p, format!("{p} is not prime"), false);
    }
    if p == 2 && !opts.force_p2 {
        return CongruenceReport::skipped(p, "p = 2 is excluded unless forced".into(), true);
    }
    let start = Instant::now();
    let det = match detp(d, p) {
        Ok(det) => det,
        Err(Error::BadPrime { reason, .. }) => return CongruenceReport::skipped(p, reason, informational),
        Err(e) => return CongruenceReport::skipped(p, e.to_string(), informational),
    };
    let order = lifted.order();
    let compared = order.min((p as usize).div_ceil(2));
    let series = det.series(order);
    let coefficients: Vec<CoefficientCheck> = (0..order)
        .map(|i| compare(i, lifted.coeff(i), series[i], p))
        .collect();
    let mismatches: Vec<usize> = coefficients[..compared]
        .iter()
        .filter(|c| c.status != CoefficientStatus::Match)
        .map(|c| c.index)
        .collect();
    let bonus_matches = coefficients[compared..]
        .iter()
        .filter(|c| c.status == CoefficientStatus::Match)
        .map(|c| c.index)
        .collect();
    CongruenceReport {
        p,
        compared_order: compared,
        status: if mismatches.is_empty() {
            ReportStatus::Pass
        } else {
            ReportStatus::Fail
        },
        informational,
        skip_reason: None,
        detp: Some(det.to_string()),
        coefficients,
        mismatches,
        bonus_matches,
        elapsed: start.elapsed(),
    }
}

fn compare(index: usize, q: &Rational, detp: Fp, p: u64) -> CoefficientCheck {
    let reduced = Fp::from_rational(q, p);
    let status = match reduced {
        None => CoefficientStatus::DenominatorBlocked,
        Some(r) if r == detp => CoefficientStatus::Match,
        Some(_) => CoefficientStatus::Mismatch,
    };
    CoefficientCheck {
        index,
        status,
        detp: detp.value(),
        rational: format_rational(q),
        reduced: reduced.map(|r| r.value()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::catalog::{d1_neg, intro};
    use crate::rings::RatFunc;

    #[test]
    fn intro_operator_passes() {
        let reports = verify_congruence(&intro(), &[13, 5, 7, 11], 7, VerifyOptions::default()).unwrap();
        let ps: Vec<u64> = reports.iter().map(|r| r.p).collect();
        assert_eq!(ps, [5, 7, 11, 13]);
        for r in &reports {
            assert_eq!(r.status, ReportStatus::Pass, "{r:?}");
            assert_eq!(r.compared_order, (r.p as usize).div_ceil(2).min(7));
            assert!(r.mismatches.is_empty());
        }
        // 1/4 t^2 + 1/24 t^3 mod 5 is 4 t^2 + 4 t^3.
        let five = &reports[0];
        assert_eq!(five.coefficients[2].detp, 4);
        assert_eq!(five.coefficients[3].detp, 4);
    }

    #[test]
    fn elliptic_operator_passes() {
        let d1 = d1_neg().with_prefactor(RatFunc::from_ints(&[-1], &[1])).unwrap();
        let reports = verify_congruence(&d1, &[11, 13], 6, VerifyOptions::default()).unwrap();
        assert!(reports.iter().all(|r| r.status == ReportStatus::Pass));
    }

    #[test]
    fn unperturbed_is_zero_on_both_sides() {
        let d = DiffOperator::unperturbed(vec![-1, 2]).unwrap();
        let reports = verify_congruence(&d, &[3, 5, 7], 4, VerifyOptions::default()).unwrap();
        for r in reports {
            assert_eq!(r.status, ReportStatus::Pass);
            assert!(r.coefficients.iter().all(|c| c.detp == 0 && c.reduced == Some(0)));
        }
    }

    #[test]
    fn skips_and_p2() {
        let reports = verify_congruence(&intro(), &[2, 9], 3, VerifyOptions::default()).unwrap();
        assert_eq!(reports[0].status, ReportStatus::Skipped);
        assert!(reports[0].informational);
        assert_eq!(reports[1].status, ReportStatus::Skipped);
        let forced = verify_congruence(&intro(), &[2], 3, VerifyOptions { force_p2: true }).unwrap();
        assert_ne!(forced[0].status, ReportStatus::Skipped);
        assert!(!forced[0].is_failure());
    }

    #[test]
    fn detects_a_wrong_lift() {
        let lifted = TruncSeries::new(vec![
            Rational::from_integer(0.into()),
            Rational::from_integer(0.into()),
            Rational::from_integer(1.into()),
        ]);
        let r = check_prime(&intro(), 5, &lifted, VerifyOptions::default());
        assert_eq!(r.status, ReportStatus::Fail);
        assert_eq!(r.mismatches, [2]);
        let blocked = TruncSeries::new(vec![
            Rational::from_integer(0.into()),
            Rational::new(1.into(), 5.into()),
        ]);
        let r = check_prime(&intro(), 5, &blocked, VerifyOptions::default());
        assert_eq!(r.coefficients[1].status, CoefficientStatus::DenominatorBlocked);
        assert!(r.is_failure());
    }
}
