use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diffop::DiffOperator;
use crate::error::{Error, Result};

const MIN_STEPS: usize = 64;
const MAX_STEPS: usize = 1 << 18;

/// Holonomy of the solution space around `|x| = radius`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct MonodromyResult {
    pub t_value: [f64; 2],
    pub radius: f64,
    /// Sorted by argument, as `[re, im]`.
    pub eigenvalues: Vec<[f64; 2]>,
    pub determinant: [f64; 2],
    pub steps: usize,
    /// Richardson estimate of the error of the finer run.
    pub estimated_error: f64,
}

impl MonodromyResult {
    pub fn eigenvalues_complex(&self) -> Vec<Complex64> {
        self.eigenvalues
            .iter()
            .map(|e| Complex64::new(e[0], e[1]))
            .collect()
    }
}

/// Coefficients `a_k(x)` of `Σ a_k(x) ∂^k` at a fixed `t`, as dense
/// polynomials in `x`.
fn symbol_polynomials(d: &DiffOperator, t: Complex64) -> Vec<Vec<Complex64>> {
    let n = d.order();
    let top = n.max(d.max_derivative());
    // Π(θ − l) expanded in powers of θ.
    let mut p = vec![Complex64::new(1.0, 0.0)];
    for &l in d.exponents() {
        let mut next = vec![Complex64::new(0.0, 0.0); p.len() + 1];
        for (j, c) in p.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= c * l as f64;
        }
        p = next;
    }
    // θ^j = Σ_k S(j, k) x^k ∂^k
    let mut s2 = vec![vec![0.0f64; n + 1]; n + 1];
    s2[0][0] = 1.0;
    for j in 1..=n {
        for k in 1..=j {
            s2[j][k] = k as f64 * s2[j - 1][k] + s2[j - 1][k - 1];
        }
    }
    let mut a: Vec<Vec<Complex64>> = vec![Vec::new(); top + 1];
    let mut put = |k: usize, i: usize, c: Complex64| {
        if a[k].len() <= i {
            a[k].resize(i + 1, Complex64::new(0.0, 0.0));
        }
        a[k][i] += c;
    };
    for k in 0..=n {
        let c: Complex64 = (k..=n).map(|j| p[j] * s2[j][k]).sum();
        put(k, k, c);
    }
    for (&(i, k), f) in d.coefficients() {
        put(k, i, f.eval_complex(t));
    }
    a
}

fn horner(p: &[Complex64], x: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
}

/// Roots of a polynomial through its companion matrix.
fn roots(p: &[Complex64]) -> Vec<Complex64> {
    let mut p = p.to_vec();
    while p.last().is_some_and(|c| c.norm() == 0.0) {
        p.pop();
    }
    let deg = p.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = p[deg];
    let mut c = DMatrix::<Complex64>::zeros(deg, deg);
    for i in 1..deg {
        c[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        c[(i, deg - 1)] = -p[i] / lead;
    }
    c.schur().eigenvalues().map(|v| v.iter().copied().collect()).unwrap_or_default()
}

struct Companion {
    symbol: Vec<Vec<Complex64>>,
    n: usize,
    radius: f64,
}

impl Companion {
    /// `dY/dθ` for `Y` the fundamental matrix, at `x = r e^{iθ}`.
    fn rhs(&self, theta: f64, y: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let n = self.n;
        let x = Complex64::from_polar(self.radius, theta);
        let lead = horner(&self.symbol[n], x);
        let mut a = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n - 1 {
            a[(i, i + 1)] = Complex64::new(1.0, 0.0);
        }
        for k in 0..n {
            a[(n - 1, k)] = -horner(&self.symbol[k], x) / lead;
        }
        a * y * (Complex64::i() * x)
    }

    fn holonomy(&self, steps: usize) -> DMatrix<Complex64> {
        let h = 2.0 * PI / steps as f64;
        let half = Complex64::new(h / 2.0, 0.0);
        let full = Complex64::new(h, 0.0);
        let two = Complex64::new(2.0, 0.0);
        let sixth = Complex64::new(h / 6.0, 0.0);
        let mut y = DMatrix::<Complex64>::identity(self.n, self.n);
        for s in 0..steps {
            let th = s as f64 * h;
            let k1 = self.rhs(th, &y);
            let k2 = self.rhs(th + h / 2.0, &(&y + &k1 * half));
            let k3 = self.rhs(th + h / 2.0, &(&y + &k2 * half));
            let k4 = self.rhs(th + h, &(&y + &k3 * full));
            y += (k1 + k2 * two + k3 * two + k4) * sixth;
        }
        y
    }
}

fn eigenvalues(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    let mut e: Vec<Complex64> = m
        .clone()
        .schur()
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .unwrap_or_default();
    e.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
    e
}

/// Largest distance after greedily pairing each new eigenvalue with the
/// nearest unused old one.
fn spectral_change(old: &[Complex64], new: &[Complex64]) -> f64 {
    let mut used = vec![false; old.len()];
    let mut worst = 0.0f64;
    for e in new {
        let (j, dist) = old
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, o)| (j, (e - o).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("same number of eigenvalues");
        used[j] = true;
        worst = worst.max(dist);
    }
    worst
}

/// Integrates the companion system of `D` at parameter `t` around the
/// circle `|x| = radius`, doubling the RK4 step count until two successive
/// spectra agree within `tol`.
pub fn monodromy_numeric(
    d: &DiffOperator,
    t: Complex64,
    radius: f64,
    tol: f64,
) -> Result<MonodromyResult> {
    if !(radius > 0.0 && radius.is_finite()) || !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "radius and tolerance must be positive, got {radius} and {tol}"
        )));
    }
    let n = d.order();
    let symbol = symbol_polynomials(d, t);
    if symbol.len() > n + 1 && symbol[n + 1..].iter().any(|p| p.iter().any(|c| c.norm() > 0.0)) {
        return Err(Error::InvalidInput(format!(
            "derivatives above order {n} are not supported numerically"
        )));
    }
    let scale = symbol[n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    for z in roots(&symbol[n]) {
        if (z.norm() - radius).abs() <= 1e-9 * scale.max(1.0) {
            return Err(Error::BadContour(format!("{:.6}{:+.6}i", z.re, z.im)));
        }
    }
    let sys = Companion {
        symbol,
        n,
        radius,
    };
    let mut steps = MIN_STEPS;
    let mut prev = eigenvalues(&sys.holonomy(steps));
    let mut change = f64::INFINITY;
    while steps < MAX_STEPS {
        steps *= 2;
        let m = sys.holonomy(steps);
        let e = eigenvalues(&m);
        change = spectral_change(&prev, &e);
        if change < tol {
            let det = m.determinant();
            return Ok(MonodromyResult {
                t_value: [t.re, t.im],
                radius,
                eigenvalues: e.iter().map(|z| [z.re, z.im]).collect(),
                determinant: [det.re, det.im],
                steps,
                estimated_error: change / 15.0,
            });
        }
        prev = e;
    }
    Err(Error::AccuracyFailure { tol, change })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::catalog::intro;

    fn dist(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm()
    }

    #[test]
    fn heun_symbol() {
        let t = Complex64::new(0.5, 0.0);
        let a = symbol_polynomials(&intro(), t);
        // x^2 - (x^3 + t x)/(1+t)
        let c = 1.0 / 1.5;
        let want = [0.0, -0.5 * c, 1.0, -c];
        for (i, w) in want.iter().enumerate() {
            assert!(dist(a[2][i], Complex64::new(*w, 0.0)) < 1e-12, "{:?}", a[2]);
        }
    }

    #[test]
    fn unperturbed_first_order() {
        let d = DiffOperator::unperturbed(vec![0]).unwrap();
        let r = monodromy_numeric(&d, Complex64::new(0.0, 0.0), 0.5, 1e-10).unwrap();
        assert_eq!(r.eigenvalues.len(), 1);
        assert!(dist(r.eigenvalues_complex()[0], Complex64::new(1.0, 0.0)) < 1e-10);
    }

    #[test]
    fn non_integer_exponent_rotation() {
        // θ(θ - 3) has solutions 1 and x^3; both single valued.
        let d = DiffOperator::unperturbed(vec![0, 3]).unwrap();
        let r = monodromy_numeric(&d, Complex64::new(0.0, 0.0), 0.7, 1e-9).unwrap();
        for e in r.eigenvalues_complex() {
            assert!(dist(e, Complex64::new(1.0, 0.0)) < 1e-8);
        }
    }

    #[test]
    fn intro_at_zero_is_trivial() {
        let r = monodromy_numeric(&intro(), Complex64::new(0.0, 0.0), 0.5, 1e-10).unwrap();
        for e in r.eigenvalues_complex() {
            assert!(dist(e, Complex64::new(1.0, 0.0)) < 1e-8, "{e}");
        }
    }

    #[test]
    fn intro_small_t() {
        let t: f64 = 0.01;
        let lam = 0.5 * t + t * t / 24.0 + 25.0 / 144.0 * t.powi(3) - 11.0 / 17280.0 * t.powi(4);
        let r = monodromy_numeric(&intro(), Complex64::new(t, 0.0), 0.5, 1e-10).unwrap();
        let e = r.eigenvalues_complex();
        let want = [
            Complex64::from_polar(1.0, -2.0 * PI * lam),
            Complex64::from_polar(1.0, 2.0 * PI * lam),
        ];
        assert!(dist(e[0], want[0]) < 1e-6 && dist(e[1], want[1]) < 1e-6, "{e:?}");
        let prod = e[0] * e[1];
        assert!(dist(prod, Complex64::new(1.0, 0.0)) < 1e-9);
        let det = Complex64::new(r.determinant[0], r.determinant[1]);
        assert!(dist(prod, det) < 1e-9);
    }

    #[test]
    fn singular_point_on_loop() {
        let err = monodromy_numeric(&intro(), Complex64::new(0.5, 0.0), 0.5, 1e-8).unwrap_err();
        assert!(matches!(err, Error::BadContour(_)), "{err}");
    }

    #[test]
    fn json_roundtrip() {
        let d = DiffOperator::unperturbed(vec![-1, 0]).unwrap();
        let r = monodromy_numeric(&d, Complex64::new(0.0, 0.0), 0.5, 1e-8).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<MonodromyResult>(&s).unwrap(), r);
    }
}
