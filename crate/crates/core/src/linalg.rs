//! Division-free determinant over an arbitrary commutative ring.

use crate::rings::Ring;

/// Berkowitz's algorithm: computes the characteristic polynomial of
/// `matrix` using only ring operations and returns its determinant.
/// Works over rings with zero divisors (truncated series rings).
pub fn berkowitz_det<R: Ring>(matrix: &[Vec<R>]) -> R {
    let n = matrix.len();
    assert!(n > 0 && matrix.iter().all(|r| r.len() == n), "square matrix required");
    let charpoly = berkowitz_charpoly(matrix);
    // charpoly[k] is the coefficient of x^(n-k) in det(xI - A).
    let c = charpoly[n].clone();
    if n % 2 == 0 {
        c
    } else {
        c.neg_ref()
    }
}

/// Coefficients `[1, c_1, ..., c_n]` of `det(xI - A) = x^n + c_1 x^(n-1) + ... + c_n`.
pub fn berkowitz_charpoly<R: Ring>(a: &[Vec<R>]) -> Vec<R> {
    let n = a.len();
    let one = a[0][0].one_like();
    let mut c = vec![one.clone(), a[0][0].neg_ref()];
    for r in 1..n {
        // Leading principal r x r block is a[..r][..r]; border row/column.
        let row: Vec<R> = a[r][..r].to_vec();
        let mut col: Vec<R> = (0..r).map(|i| a[i][r].clone()).collect();
        let mut q = Vec::with_capacity(r + 2);
        q.push(one.clone());
        q.push(a[r][r].neg_ref());
        for _ in 0..r {
            let dot = row
                .iter()
                .zip(&col)
                .fold(one.zero_like(), |acc, (x, y)| acc.add_ref(&x.mul_ref(y)));
            q.push(dot.neg_ref());
            col = (0..r)
                .map(|i| {
                    (0..r).fold(one.zero_like(), |acc, j| {
                        if a[i][j].is_zero() || col[j].is_zero() {
                            acc
                        } else {
                            acc.add_ref(&a[i][j].mul_ref(&col[j]))
                        }
                    })
                })
                .collect();
        }
        let next: Vec<R> = (0..=r + 1)
            .map(|k| {
                (0..=k.min(r)).fold(one.zero_like(), |acc, j| {
                    acc.add_ref(&q[k - j].mul_ref(&c[j]))
                })
            })
            .collect();
        c = next;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{rat, Fp, Rational};
    use proptest::prelude::*;

    fn cofactor(m: &[Vec<Rational>]) -> Rational {
        let n = m.len();
        if n == 1 {
            return m[0][0].clone();
        }
        (0..n)
            .map(|c| {
                let minor: Vec<Vec<Rational>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != c)
                            .map(|(_, e)| e.clone())
                            .collect()
                    })
                    .collect();
                let t = &m[0][c] * cofactor(&minor);
                if c % 2 == 0 {
                    t
                } else {
                    -t
                }
            })
            .fold(rat(0, 1), |a, b| a + b)
    }

    #[test]
    fn two_by_two() {
        let m = vec![vec![rat(1, 1), rat(2, 1)], vec![rat(3, 1), rat(4, 1)]];
        assert_eq!(berkowitz_det(&m), rat(-2, 1));
        assert_eq!(
            berkowitz_charpoly(&m),
            vec![rat(1, 1), rat(-5, 1), rat(-2, 1)]
        );
    }

    #[test]
    fn over_f2() {
        let m = vec![
            vec![Fp::new(1, 2), Fp::new(1, 2)],
            vec![Fp::new(1, 2), Fp::new(0, 2)],
        ];
        assert_eq!(berkowitz_det(&m), Fp::new(1, 2));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn matches_cofactor(n in 1usize..6, seed in prop::collection::vec(-5i64..6, 36)) {
            let m: Vec<Vec<Rational>> = (0..n)
                .map(|i| (0..n).map(|j| rat(seed[i * 6 + j], 1 + (i + j) as i64 % 3)).collect())
                .collect();
            prop_assert_eq!(berkowitz_det(&m), cofactor(&m));
        }
    }
}
