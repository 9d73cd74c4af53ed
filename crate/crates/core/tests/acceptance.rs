//! Acceptance criteria 1-10. Every criterion prints one PASS/FAIL line to the
//! real stdout (visible even when test output is captured) and fails its test
//! on FAIL.

use std::f64::consts::PI;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use pdet_core::diffop::{catalog, detp, DiffOperator};
use pdet_core::monodromy::{lambda_elliptic, lambda_heun, monodromy_numeric};
use pdet_core::regdet::{ldet, regularized_wpoly, w_via_trace, w_via_trace_at};
use pdet_core::rings::{rat, Fp, Rational};
use pdet_core::series::{EpsPoly, LaurentSeries, TruncSeries};
use pdet_core::verify::{
    conjectured_alpha, denominator_profile, elliptic_square, verify_congruence, CoefficientCache,
    ReportStatus, VerifyOptions,
};
use pdet_core::weierstrass::{weierstrass_iterative, weierstrass_split};

type Outcome = Result<String, String>;

fn criterion(n: u32, name: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(msg)
    });
    let elapsed = start.elapsed();
    let result = match (result, budget) {
        (Ok(_), Some(b)) if elapsed > b => Err(format!("took {elapsed:.1?}, budget {b:?}")),
        (r, _) => r,
    };
    let line = match &result {
        Ok(detail) => format!("criterion {n:>2}: PASS  {name} [{elapsed:.2?}] {detail}"),
        Err(e) => format!("criterion {n:>2}: FAIL  {name} [{elapsed:.2?}] {e}"),
    };
    let _ = writeln!(std::io::stdout(), "{line}");
    if let Err(e) = result {
        panic!("criterion {n} failed: {e}");
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rats(v: &[(i64, i64)]) -> Vec<Rational> {
    v.iter().map(|&(n, d)| rat(n, d)).collect()
}

fn lambda_expected() -> Vec<Rational> {
    rats(&[
        (1, 2),
        (1, 24),
        (25, 144),
        (-11, 17280),
        (70591, 518400),
        (-774601, 24192000),
        (2215989011, 15240960000),
    ])
}

fn h_expected() -> Vec<Rational> {
    rats(&[
        (1, 4),
        (1, 24),
        (101, 576),
        (239, 17280),
        (19153, 115200),
        (-1516283, 72576000),
        (23167560743, 121927680000),
    ])
}

fn coeffs_from(s: &LaurentSeries, from: i64, count: usize) -> Vec<Rational> {
    (from..from + count as i64)
        .map(|i| s.coeff(i).expect("within precision"))
        .collect()
}

fn h_through(order: usize) -> TruncSeries {
    let lam = lambda_heun(order).expect("heun solver");
    (&lam * &lam).to_trunc(order).expect("power series")
}

#[test]
fn criterion_01_heun_series() {
    criterion(1, "continued-fraction series lambda_heun(8)", Some(Duration::from_secs(10)), || {
        let lam = lambda_heun(8).map_err(|e| e.to_string())?;
        check(lam.coeff(0) == Some(Rational::zero()), || "nonzero constant term".into())?;
        let got = coeffs_from(&lam, 1, 7);
        check(got == lambda_expected(), || format!("got {got:?}"))?;
        Ok("7/7 coefficients exact".into())
    });
}

#[test]
fn criterion_02_h_is_lambda_squared() {
    criterion(2, "h = lambda_heun(9)^2", None, || {
        let lam = lambda_heun(9).map_err(|e| e.to_string())?;
        let h = &lam * &lam;
        let got = coeffs_from(&h, 2, 7);
        check(got == h_expected(), || format!("got {got:?}"))?;
        Ok("t^2..t^8 exact".into())
    });
}

#[test]
fn criterion_03_p_determinant_congruence() {
    criterion(3, "Det_p(intro) = sum c_i t^i - t^(p-1) mod (p, t^ceil(p/2))", Some(Duration::from_secs(30)), || {
        let h = h_through(9);
        let d = catalog::intro();
        let mut done = Vec::new();
        for p in [5u64, 7, 11, 13] {
            let cut = (p as usize).div_ceil(2);
            let det = detp(&d, p).map_err(|e| e.to_string())?;
            let got = det.series(cut);
            for (i, g) in got.iter().enumerate() {
                let mut want = Fp::from_rational(h.coeff(i), p).ok_or(format!("p={p} divides a denominator"))?;
                if i == p as usize - 1 {
                    want = want - Fp::one(p);
                }
                check(*g == want, || format!("p={p} t^{i}: Det_p has {g:?}, series gives {want:?}"))?;
            }
            done.push(format!("p={p}:{cut}"));
        }
        Ok(format!("coefficients compared {}", done.join(" ")))
    });
}

#[test]
fn criterion_04_pipeline_consistency() {
    criterion(4, "-ldet(D0, 9) = lambda_heun(9)^2", None, || {
        let l = ldet(&catalog::d0(), 9).map_err(|e| e.to_string())?;
        let cert = l.certified_order();
        check(cert == 9, || format!("certified only through t^{}", cert as i64 - 1))?;
        let h = h_through(9);
        let left = -&l.value;
        for i in 0..cert {
            check(left.coeff(i) == h.coeff(i), || {
                format!("t^{i}: ldet gives {}, heun gives {}", left.coeff(i), h.coeff(i))
            })?;
        }
        Ok(format!("{cert} certified coefficients equal"))
    });
}

#[test]
fn criterion_05_elliptic_example() {
    criterion(5, "elliptic closed form, (lambda-1)^2 and D1 congruences", None, || {
        let l = lambda_elliptic(6);
        let want = rats(&[(1, 1), (1, 4), (9, 64), (25, 256), (1225, 16384), (3969, 65536)]);
        check(l.coeffs() == want.as_slice(), || format!("lambda_elliptic {l}"))?;
        let sq = elliptic_square(9);
        check(sq.coeffs()[2..5] == rats(&[(1, 16), (9, 128), (281, 4096)])[..], || format!("(lambda-1)^2 = {sq}"))?;
        for c in sq.coeffs() {
            let d = c.denom();
            let bits = d.bits();
            check(*d == BigInt::from(1) << (bits - 1), || format!("denominator {d} is not a power of 2"))?;
        }
        let reports = verify_congruence(&catalog::d1(), &[11, 13], 7, VerifyOptions::default())
            .map_err(|e| e.to_string())?;
        for r in &reports {
            check(r.status == ReportStatus::Pass, || format!("p={} {:?} mismatches {:?}", r.p, r.status, r.mismatches))?;
            check(r.compared_order == (r.p as usize).div_ceil(2), || format!("p={} compared {}", r.p, r.compared_order))?;
        }
        Ok("values exact, p=11,13 pass, denominators 2-power through t^8".into())
    });
}

#[test]
fn criterion_06_denominator_at_twenty() {
    criterion(6, "denominator of h at t^20", Some(Duration::from_secs(3600)), || {
        let h = h_through(21);
        let c = h.coeff(20);
        let want: BigInt = [(2u32, 37u32), (3, 24), (5, 16), (7, 14), (11, 10), (13, 8), (17, 4), (19, 2)]
            .iter()
            .map(|&(p, a)| BigInt::from(p).pow(a))
            .product();
        check(*c.denom() == want, || format!("denominator {}", c.denom()))?;
        // Persist and reload through the coefficient cache.
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let cache = CoefficientCache::new(dir.path());
        cache.store(None, "h-heun", &h, 21).map_err(|e| e.to_string())?;
        let back = cache.load(None, "h-heun", 21).map_err(|e| e.to_string())?.ok_or("cache miss")?;
        check(back.series == h, || "cache round trip changed the series".into())?;
        let prof = denominator_profile(&back.series, 20);
        let e = prof.entry(20).ok_or("no entry for n=20")?;
        for v in &e.valuations {
            check(v.observed == conjectured_alpha(v.p, 20), || {
                format!("alpha_{}(20): observed {}, formula {}", v.p, v.observed, v.conjectured)
            })?;
        }
        check(e.sign == 1 && e.coprime_part == "1" && e.b_coprime, || format!("{e:?}"))?;
        Ok(format!("{} digits, alpha_p(20) match for p <= 19", want.to_string().len()))
    });
}

fn series(v: Vec<i64>) -> TruncSeries {
    TruncSeries::new(v.into_iter().map(|x| rat(x, 1)).collect())
}

fn arb_weierstrass_input() -> impl Strategy<Value = (EpsPoly, usize)> {
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

#[test]
fn criterion_07_weierstrass_agreement() {
    criterion(7, "two Weierstrass algorithms on 100 random inputs", None, || {
        let mut runner = TestRunner::new_with_rng(
            Config::with_cases(100),
            TestRng::deterministic_rng(RngAlgorithm::ChaCha),
        );
        runner
            .run(&arb_weierstrass_input(), |(q, n)| {
                let a = weierstrass_iterative(&q, n).expect("admissible");
                let b = weierstrass_split(&q, n).expect("admissible");
                prop_assert_eq!(&a, &b);
                prop_assert_eq!(&a.polynomial(q.bound()) * &a.q_inv, q.clone());
                Ok(())
            })
            .map_err(|e| e.to_string())?;
        Ok("100 cases agree and reconstruct".into())
    });
}

#[test]
fn criterion_08_trace_route() {
    criterion(8, "trace route equals determinant route on D0, K=3", None, || {
        let d = catalog::d0();
        let (w, _) = regularized_wpoly(&d, 3).map_err(|e| e.to_string())?;
        let t = w_via_trace(&d, 3).map_err(|e| e.to_string())?;
        check(t == w, || format!("trace {t} vs determinant {w}"))?;
        let b2 = w_via_trace_at(&d, 3, 2).map_err(|e| e.to_string())?;
        let b3 = w_via_trace_at(&d, 3, 3).map_err(|e| e.to_string())?;
        check(b2 == w && b3 == w, || format!("b=2 {b2}, b=3 {b3}"))?;
        Ok(format!("w = {w}"))
    });
}

#[test]
fn criterion_09_numeric_monodromy() {
    criterion(9, "numeric monodromy of the Heun operator", Some(Duration::from_secs(10)), || {
        let lam = lambda_heun(8).map_err(|e| e.to_string())?;
        let t = 0.01f64;
        let lam_t: f64 = (1..8)
            .map(|i| lam.coeff(i).unwrap().to_f64().unwrap() * t.powi(i as i32))
            .sum();
        let d = catalog::intro();
        let r = monodromy_numeric(&d, Complex64::new(t, 0.0), 0.5, 1e-10).map_err(|e| e.to_string())?;
        let e = r.eigenvalues_complex();
        let want = [Complex64::from_polar(1.0, -2.0 * PI * lam_t), Complex64::from_polar(1.0, 2.0 * PI * lam_t)];
        check(e.len() == 2, || format!("{e:?}"))?;
        let err = (e[0] - want[0]).norm().max((e[1] - want[1]).norm());
        check(err < 1e-6, || format!("eigenvalues {e:?}, expected {want:?}"))?;
        let prod = (e[0] * e[1] - Complex64::new(1.0, 0.0)).norm();
        check(prod < 1e-8, || format!("eigenvalue product off by {prod:e}"))?;
        let z = monodromy_numeric(&d, Complex64::new(0.0, 0.0), 0.5, 1e-10).map_err(|e| e.to_string())?;
        for v in z.eigenvalues_complex() {
            check((v - Complex64::new(1.0, 0.0)).norm() < 1e-8, || format!("t=0 eigenvalue {v}"))?;
        }
        Ok(format!("lambda(0.01) = {lam_t:.10}, max error {err:.1e}"))
    });
}

#[test]
fn criterion_10_triviality() {
    criterion(10, "unperturbed operators are trivial", None, || {
        let cases: [&[i64]; 5] = [&[0], &[-1, 0], &[-1, 2], &[0, 0, 1], &[-2, 1, 3]];
        for l in cases {
            let d = DiffOperator::unperturbed(l.to_vec()).map_err(|e| e.to_string())?;
            let n = l.len();
            for p in [3u64, 5, 7, 11] {
                let det = detp(&d, p).map_err(|e| e.to_string())?;
                check(det.num.is_zero(), || format!("l={l:?} p={p}: {det}"))?;
            }
            let r = ldet(&d, 5).map_err(|e| e.to_string())?;
            check(r.value.is_zero(), || format!("l={l:?}: ldet {}", r.value))?;
            let mut eps_n = vec![rat(0, 1); n + 1];
            eps_n[n] = rat(1, 1);
            let want = EpsPoly::from_rationals(&eps_n, r.w.bound(), 5);
            check(r.w == want, || format!("l={l:?}: w = {}", r.w))?;
        }
        Ok("5 operators x 4 primes".into())
    });
}
