//! Exact solution of rational linear systems by fraction-free elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::AnalysisError;

/// Solution of a square system.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: Vec<BigRational>,
    /// The matrix was singular but the system consistent; unknowns without
    /// a pivot were set to zero.
    pub deficient: bool,
}

/// Solve `a x = b` for square `a`. Consistent singular systems yield the
/// particular solution with free unknowns zero; inconsistent ones `Singular`.
pub fn solve_rational(a: &[Vec<BigRational>], b: &[BigRational]) -> Result<Solution, AnalysisError> {
    let n = a.len();
    assert_eq!(b.len(), n);
    // clear denominators row by row
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            assert_eq!(row.len(), n);
            let lcm = row.iter().chain(std::iter::once(rhs)).fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter()
                .chain(std::iter::once(rhs))
                .map(|x| x.numer() * (&lcm / x.denom()))
                .collect()
        })
        .collect();

    let mut prev = BigInt::one();
    let mut pivots = Vec::with_capacity(n);
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..n).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let (head, tail) = m.split_at_mut(r + 1);
        let row_r = &head[r];
        for row in tail.iter_mut() {
            for j in c + 1..=n {
                let v = (&row_r[c] * &row[j] - &row[c] * &row_r[j]) / &prev;
                row[j] = v;
            }
            row[c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[n].is_zero()) {
        return Err(AnalysisError::Singular);
    }

    let mut x = vec![BigRational::zero(); n];
    for (i, &c) in pivots.iter().enumerate().rev() {
        let mut acc = BigRational::from_integer(m[i][n].clone());
        for j in c + 1..n {
            if !x[j].is_zero() {
                acc -= &x[j] * &m[i][j];
            }
        }
        x[c] = acc / &m[i][c];
    }
    Ok(Solution { x, deficient: pivots.len() < n })
}
