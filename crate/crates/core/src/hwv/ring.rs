//! Coefficient rings for the evaluation engines.
//!
//! `i128` arithmetic is checked and reports overflow as `None`, so callers
//! can retry the same computation over `BigInt`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::{det_bigint, poly_det, MultiPoly, PolyMatrix};

pub trait EvalRing: Clone + Send + Sync + Sized {
    fn zero_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
    /// Determinant of the square matrix with the given columns.
    fn det(cols: &[&[Self]], one: &Self) -> Option<Self>;
}

impl EvalRing for i128 {
    fn zero_like(&self) -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn det(cols: &[&[Self]], _one: &Self) -> Option<Self> {
        let n = cols.len();
        match n {
            0 => return Some(1),
            1 => return Some(cols[0][0]),
            2 => return cols[0][0].checked_mul(cols[1][1])?.checked_sub(cols[1][0].checked_mul(cols[0][1])?),
            _ => {}
        }
        // Bareiss on the transpose; the determinant is the same
        let mut a: Vec<Vec<i128>> = cols.iter().map(|c| c[..n].to_vec()).collect();
        let mut negate = false;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&r| a[r][k] != 0) {
                    Some(r) => a.swap(k, r),
                    None => return Some(0),
                }
                negate = !negate;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[i][j].checked_mul(a[k][k])?.checked_sub(a[i][k].checked_mul(a[k][j])?)?;
                    a[i][j] = num / prev;
                }
            }
            prev = a[k][k];
        }
        let d = a[n - 1][n - 1];
        if negate {
            d.checked_neg()
        } else {
            Some(d)
        }
    }
}

impl EvalRing for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn det(cols: &[&[Self]], _one: &Self) -> Option<Self> {
        let n = cols.len();
        if n == 0 {
            return Some(BigInt::one());
        }
        Some(det_bigint(cols.iter().map(|c| c[..n].to_vec()).collect()))
    }
}

impl EvalRing for MultiPoly {
    fn zero_like(&self) -> Self {
        MultiPoly::zero(self.nvars())
    }
    fn is_zero(&self) -> bool {
        MultiPoly::is_zero(self)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn det(cols: &[&[Self]], one: &Self) -> Option<Self> {
        let n = cols.len();
        let m = PolyMatrix::from_columns(n, cols.iter().map(|c| c[..n].to_vec()).collect(), one.nvars());
        Some(poly_det(&m).expect("square"))
    }
}

/// Runs the `i128` computation and reruns it over `BigInt` if it overflowed.
pub fn with_fallback<F, G>(fast: F, exact: G) -> crate::Result<BigInt>
where
    F: FnOnce() -> crate::Result<Option<i128>>,
    G: FnOnce() -> crate::Result<Option<BigInt>>,
{
    match fast()? {
        Some(v) => Ok(BigInt::from(v)),
        None => Ok(exact()?.expect("BigInt arithmetic does not overflow")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i128_det_matches_bigint() {
        let cols: Vec<Vec<i128>> = vec![vec![2, 1, 0, 3], vec![0, 1, 4, 1], vec![5, 0, 1, 1], vec![1, 1, 1, 0]];
        let refs: Vec<&[i128]> = cols.iter().map(Vec::as_slice).collect();
        let big: Vec<Vec<BigInt>> = cols.iter().map(|c| c.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let brefs: Vec<&[BigInt]> = big.iter().map(Vec::as_slice).collect();
        assert_eq!(BigInt::from(i128::det(&refs, &1).unwrap()), BigInt::det(&brefs, &BigInt::one()).unwrap());
        let big = [vec![i128::MAX / 2, 0], vec![0, 3]];
        let refs: Vec<&[i128]> = big.iter().map(Vec::as_slice).collect();
        assert_eq!(i128::det(&refs, &1), None);
    }
}
