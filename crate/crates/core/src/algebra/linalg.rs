use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;
use crate::error::{Error, Result};

/// Bareiss fraction-free determinant of a square integer matrix.
pub fn det_bigint(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if negate {
        -a[n - 1][n - 1].clone()
    } else {
        a[n - 1][n - 1].clone()
    }
}

/// Rank over `Q` of an integer matrix (rows may have any common length).
pub fn rank_bigint(mut a: Vec<Vec<BigInt>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..rows {
            if a[r][c].is_zero() {
                continue;
            }
            let g = a[rank][c].gcd(&a[r][c]);
            let fp = &a[r][c] / &g;
            let fr = &a[rank][c] / &g;
            for j in c..cols {
                let v = &a[r][j] * &fr - &a[rank][j] * &fp;
                a[r][j] = v;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Splits a rational vector into `(integer numerators, common denominator)`.
pub fn integerize(v: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let den = common_denominator(v);
    let ints = v.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    (ints, den)
}

/// Dense matrix over the rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(QMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_ints(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rational::from_integer(v.into())).collect())
                .collect(),
        )
        .expect("rectangular input")
    }

    pub fn diagonal(diag: &[Rational]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        self.data.chunks(self.cols.max(1)).map(<[Rational]>::to_vec).collect()
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix applied to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .filter(|&j| !v[j].is_zero())
                    .map(|j| self.get(i, j) * &v[j])
                    .sum()
            })
            .collect())
    }

    pub fn mul(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn det(&self) -> Result<Rational> {
        if self.rows != self.cols {
            return Err(Error::NonSquare { rows: self.rows, cols: self.cols });
        }
        let cols: Vec<Vec<Rational>> =
            (0..self.cols).map(|j| (0..self.rows).map(|i| self.get(i, j).clone()).collect()).collect();
        Ok(det_columns(&cols))
    }

    pub fn rank(&self) -> usize {
        let rows: Vec<Vec<BigInt>> = self.to_rows().iter().map(|r| integerize(r).0).collect();
        rank_bigint(rows)
    }

    pub fn is_lower_unitriangular(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                self.get(i, i).is_one() && (i + 1..self.cols).all(|j| self.get(i, j).is_zero())
            })
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows().iter().map(|r| {
            r.iter().map(|x| x.to_string()).collect::<Vec<_>>()
        })).finish()
    }
}

/// Determinant of the square matrix whose columns are given.
pub fn det_columns(cols: &[Vec<Rational>]) -> Rational {
    let n = cols.len();
    let mut den = BigInt::one();
    let mut int_cols = Vec::with_capacity(n);
    for c in cols {
        let (ints, d) = integerize(c);
        den *= d;
        int_cols.push(ints);
    }
    let rows: Vec<Vec<BigInt>> = (0..n).map(|i| int_cols.iter().map(|c| c[i].clone()).collect()).collect();
    Rational::new(det_bigint(rows), den)
}

pub fn is_nonzero_vector(v: &[Rational]) -> bool {
    v.iter().any(|x| !x.is_zero())
}

/// Sign of a permutation given as a sequence of distinct integers.
pub fn permutation_sign(seq: &[usize]) -> i32 {
    let mut inv = 0usize;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    if inv.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Magnitude sign helper for integers.
pub fn sign_of(x: &BigInt) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_negative() {
        -1
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
    }

    #[test]
    fn integer_det_and_rank() {
        assert_eq!(det_bigint(bi(&[&[2, 0], &[0, 3]])), BigInt::from(6));
        assert_eq!(det_bigint(bi(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(det_bigint(bi(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]])), BigInt::zero());
        assert_eq!(rank_bigint(bi(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]])), 2);
        assert_eq!(rank_bigint(bi(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rank_bigint(bi(&[&[1, 2, 3, 4]])), 1);
    }

    #[test]
    fn rational_matrix_ops() {
        let half = Rational::new(1.into(), 2.into());
        let m = QMatrix::diagonal(&[half.clone(), Rational::from_integer(4.into())]);
        assert_eq!(m.det().unwrap(), Rational::from_integer(2.into()));
        let p = m.mul(&QMatrix::identity(2)).unwrap();
        assert_eq!(p, m);
        let v = m.mul_vec(&[Rational::one(), Rational::one()]).unwrap();
        assert_eq!(v, vec![half, Rational::from_integer(4.into())]);
        assert!(m.mul_vec(&[Rational::one()]).is_err());
    }

    #[test]
    fn signs() {
        assert_eq!(permutation_sign(&[0, 1, 2]), 1);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1);
        assert_eq!(permutation_sign(&[2, 0, 1]), 1);
    }
}
