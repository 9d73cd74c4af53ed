//! The congruence and conjecture harness. All sign and prefactor
//! bookkeeping between the pipelines lives here.

mod cache;
mod congruence;
mod profile;

use serde::{Deserialize, Serialize};

pub use cache::{CacheEntry, CacheHeader, CoefficientCache, CACHE_DIR_ENV, FORMAT_VERSION};
pub use congruence::{
    verify_congruence, CoefficientCheck, CoefficientStatus, CongruenceReport, ReportStatus,
    VerifyOptions,
};
pub use profile::{
    conjectured_alpha, denominator_profile, DenominatorProfile, PrimeValuation, ProfileEntry,
    DOCUMENTED_EXCEPTIONS,
};

use crate::diffop::catalog;
use crate::error::Result;
use crate::monodromy::{lambda_elliptic, lambda_heun};
use crate::regdet::ldet;
use crate::rings::format_rational;
use crate::series::TruncSeries;

/// `h = λ²` through `t^{K−1}`, from the continued-fraction solver.
pub fn h_series(order: usize) -> Result<TruncSeries> {
    let lam = lambda_heun(order.max(2))?;
    (&lam * &lam).to_trunc(order)
}

/// `(λ_ell − 1)²` through `t^{K−1}`.
pub fn elliptic_square(order: usize) -> TruncSeries {
    let d = &lambda_elliptic(order) - &TruncSeries::one(order);
    &d * &d
}

/// Exact comparison of two pipelines through a certified order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub order: usize,
    pub certified_order: usize,
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub mismatches: Vec<usize>,
}

impl IdentityCheck {
    fn new(name: &str, order: usize, certified: usize, left: &TruncSeries, right: &TruncSeries) -> Self {
        let show = |s: &TruncSeries| s.coeffs()[..certified].iter().map(format_rational).collect();
        IdentityCheck {
            name: name.to_string(),
            order,
            certified_order: certified,
            left: show(left),
            right: show(right),
            mismatches: (0..certified).filter(|&i| left.coeff(i) != right.coeff(i)).collect(),
        }
    }

    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.certified_order == self.order
    }
}

/// `−L(D₀) = λ²` for the Heun operator in canonical form.
pub fn check_heun_identity(order: usize) -> Result<IdentityCheck> {
    let l = ldet(&catalog::d0(), order)?;
    let left = -&l.value;
    let right = h_series(order)?;
    Ok(IdentityCheck::new("-ldet(D0) = lambda_heun^2", order, l.certified_order().min(order), &left, &right))
}

/// `−L(−D₁) = (λ_ell − 1)²`.
pub fn check_elliptic_identity(order: usize) -> Result<IdentityCheck> {
    let l = ldet(&catalog::d1_neg(), order)?;
    let left = -&l.value;
    let right = elliptic_square(order);
    Ok(IdentityCheck::new("-ldet(-D1) = (lambda_elliptic - 1)^2", order, l.certified_order().min(order), &left, &right))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::rat;

    #[test]
    fn h_prefix() {
        let h = h_series(5).unwrap();
        assert_eq!(h.coeffs(), &[rat(0, 1), rat(0, 1), rat(1, 4), rat(1, 24), rat(101, 576)]);
    }

    #[test]
    fn identities_hold() {
        for k in [3, 6] {
            let a = check_heun_identity(k).unwrap();
            assert!(a.passed(), "{a:?}");
            let b = check_elliptic_identity(k).unwrap();
            assert!(b.passed(), "{b:?}");
        }
    }

    #[test]
    fn h_denominators_follow_the_conjecture_to_twelve() {
        let prof = denominator_profile(&h_series(13).unwrap(), 2);
        assert!(prof.conjecture_holds(), "{:?}", prof.deviations());
    }

    #[test]
    fn elliptic_denominators_are_powers_of_two() {
        let s = elliptic_square(9);
        for c in s.coeffs() {
            let d = c.denom().clone();
            assert_eq!(profile::ord(&d, 2), d.bits() as u32 - 1, "{d}");
        }
    }
}
