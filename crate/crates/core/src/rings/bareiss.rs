use super::PolyFp;
use crate::error::{Error, Result};

/// Determinant of a square matrix over (Z/p)[t] by fraction-free
/// (Bareiss) elimination. Every division performed is exact.
pub fn poly_bareiss_det(matrix: &[Vec<PolyFp>]) -> Result<PolyFp> {
    let n = matrix.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    if matrix.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidInput("matrix is not square".into()));
    }
    let p = matrix[0][0].modulus();
    if matrix.iter().flatten().any(|e| e.modulus() != p) {
        return Err(Error::InvalidInput("entries over different prime fields".into()));
    }

    let mut a: Vec<Vec<PolyFp>> = matrix.to_vec();
    let mut prev = PolyFp::monomial(p, 0);
    let mut negate = false;
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return Ok(PolyFp::zero(p)),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num
                    .div_exact(&prev)
                    .expect("Bareiss division is exact over a domain");
            }
            a[i][k] = PolyFp::zero(p);
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if negate { -&det } else { det })
}
