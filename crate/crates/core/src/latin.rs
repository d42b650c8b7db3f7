//! Latin squares as labelings of the design `H_n = {(i, j, n(i−1)+j)}`.
//!
//! `f_{H_n}(Σ_i |ii1⟩)` is the number of even minus the number of odd
//! Latin squares of order `n`.

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::linalg::permutation_sign;
use crate::algebra::rat;
use crate::designs::ObstructionDesign;
use crate::error::{Error, Result};
use crate::hwv::eval_fh;
use crate::tensors::Rank1Decomposition;

pub const MAX_ORDER: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatinSquare {
    n: usize,
    grid: Vec<Vec<usize>>,
}

impl LatinSquare {
    /// `grid[i][j] ∈ [n]`, each symbol once per row and column.
    pub fn new(grid: Vec<Vec<usize>>) -> Result<Self> {
        let n = grid.len();
        let perm = |v: &[usize]| {
            let mut s = v.to_vec();
            s.sort_unstable();
            s == (1..=n).collect::<Vec<_>>()
        };
        if grid.iter().any(|r| r.len() != n || !perm(r)) {
            return Err(Error::InvalidDesign("a row is not a permutation of 1..n".into()));
        }
        if (0..n).any(|j| !perm(&grid.iter().map(|r| r[j]).collect::<Vec<_>>())) {
            return Err(Error::InvalidDesign("a column is not a permutation of 1..n".into()));
        }
        Ok(LatinSquare { n, grid })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> &[Vec<usize>] {
        &self.grid
    }

    /// Product of the signs of all row and column permutations.
    pub fn sign(&self) -> i32 {
        let rows: i32 = self.grid.iter().map(|r| permutation_sign(r)).product();
        let cols: i32 = (0..self.n)
            .map(|j| permutation_sign(&self.grid.iter().map(|r| r[j]).collect::<Vec<_>>()))
            .product();
        rows * cols
    }

    pub fn swap_rows(&self, a: usize, b: usize) -> Self {
        let mut grid = self.grid.clone();
        grid.swap(a, b);
        LatinSquare { n: self.n, grid }
    }

    /// The labeling of `H_n` (points in lexicographic order) by symbols, 0-based.
    pub fn to_labeling(&self) -> Vec<usize> {
        self.grid.iter().flatten().map(|&s| s - 1).collect()
    }
}

/// `H_n ⊆ [n] × [n] × [n²]`.
pub fn latin_design(n: usize) -> Result<ObstructionDesign> {
    if n == 0 {
        return Err(Error::InvalidDesign("n must be positive".into()));
    }
    let pts = (1..=n).flat_map(|i| (1..=n).map(move |j| [i, j, n * (i - 1) + j])).collect();
    ObstructionDesign::new([n, n, n * n], pts)
}

/// `w = Σ_i |i i 1⟩` in `C^n ⊗ C^n ⊗ C^{n²}`.
pub fn latin_target(n: usize) -> Rank1Decomposition {
    let unit = |dim: usize, i: usize| (1..=dim).map(|j| rat((i == j) as i64)).collect::<Vec<_>>();
    let triples = (1..=n).map(|i| [unit(n, i), unit(n, i), unit(n * n, 1)]).collect();
    Rank1Decomposition::new([n, n, n * n], triples).expect("nonzero vectors")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Eval,
    Enumerate,
    Both,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlonTarsi {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "opt_decimal")]
    pub eval: Option<BigInt>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "opt_decimal")]
    pub enumeration: Option<BigInt>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "opt_decimal")]
    pub latin_squares: Option<BigInt>,
}

fn opt_decimal<S: serde::Serializer>(v: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_str(&x.to_string()),
        None => s.serialize_none(),
    }
}

impl AlonTarsi {
    pub fn value(&self) -> &BigInt {
        self.eval.as_ref().or(self.enumeration.as_ref()).expect("at least one path")
    }
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::ScaleExceeded(format!("order {n} outside 1..={MAX_ORDER}")));
    }
    Ok(())
}

/// Even minus odd Latin squares of order `n`, by `f_{H_n}(w)`, by direct
/// enumeration, or both (which must agree).
pub fn alon_tarsi_difference(n: usize, method: Method, budget: u64) -> Result<AlonTarsi> {
    check_order(n)?;
    let eval = match method {
        Method::Eval | Method::Both => {
            let r = eval_fh(&latin_design(n)?, &latin_target(n), budget)?;
            let v = r.numeric().expect("numeric");
            if !v.is_integer() {
                return Err(Error::CertificateRejected(format!("non-integral value {v}")));
            }
            Some(v.to_integer())
        }
        Method::Enumerate => None,
    };
    let (enumeration, latin_squares) = match method {
        Method::Enumerate | Method::Both => {
            let s = enumerate_stats(n);
            (Some(s.difference), Some(s.count))
        }
        Method::Eval => (None, None),
    };
    if let (Some(a), Some(b)) = (&eval, &enumeration) {
        if a != b {
            return Err(Error::CertificateRejected(format!("evaluation gives {a}, enumeration gives {b}")));
        }
    }
    Ok(AlonTarsi { n, eval, enumeration, latin_squares })
}

pub fn count_latin_squares(n: usize) -> Result<BigInt> {
    check_order(n)?;
    Ok(enumerate_stats(n).count)
}

struct Stats {
    count: BigInt,
    difference: BigInt,
}

struct Filler {
    n: usize,
    rows: Vec<u32>,
    cols: Vec<u32>,
    /// inversion parity of every row and column so far
    parity: u32,
    count: u64,
    even: u64,
}

impl Filler {
    fn place(&mut self, i: usize, j: usize, s: usize) {
        let inv = (self.rows[i] >> s).count_ones() + (self.cols[j] >> s).count_ones();
        self.parity ^= inv & 1;
        self.rows[i] |= 1 << s;
        self.cols[j] |= 1 << s;
    }

    fn unplace(&mut self, i: usize, j: usize, s: usize) {
        self.rows[i] &= !(1 << s);
        self.cols[j] &= !(1 << s);
        let inv = (self.rows[i] >> s).count_ones() + (self.cols[j] >> s).count_ones();
        self.parity ^= inv & 1;
    }
}

/// Squares with first row `1..n`, split by the first column, then scaled
/// by `n!`: relabeling symbols by `π` multiplies the sign by `sgn(π)^{2n}`.
fn enumerate_stats(n: usize) -> Stats {
    let branches: Vec<Vec<usize>> = if n == 1 {
        vec![vec![0]]
    } else {
        // first column below the first row: arrangements of 1..n-1 placed in rows 2..n
        let mut out = Vec::new();
        let mut cur = vec![0];
        fn rec(n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == n {
                out.push(cur.clone());
                return;
            }
            for s in 1..n {
                if !cur.contains(&s) {
                    cur.push(s);
                    rec(n, cur, out);
                    cur.pop();
                }
            }
        }
        rec(n, &mut cur, &mut out);
        out
    };
    let parts: Vec<(u64, u64)> = branches
        .par_iter()
        .map(|col| {
            let mut f = Filler { n, rows: vec![0; n], cols: vec![0; n], parity: 0, count: 0, even: 0 };
            for j in 0..n {
                f.place(0, j, j);
            }
            for (i, &s) in col.iter().enumerate().skip(1) {
                f.place(i, 0, s);
            }
            f.fill_skipping_column0(n);
            (f.count, f.even)
        })
        .collect();
    let (count, even) = parts.iter().fold((0u64, 0u64), |a, b| (a.0 + b.0, a.1 + b.1));
    let fact: BigInt = (1..=n).map(BigInt::from).product();
    let diff = BigInt::from(even) * 2 - BigInt::from(count);
    Stats { count: BigInt::from(count) * &fact, difference: diff * fact }
}

impl Filler {
    /// Fills rows `2..n` cell by cell, leaving column 1 as preset.
    fn fill_skipping_column0(&mut self, start: usize) {
        let n = self.n;
        let mut cell = start;
        while cell < n * n && cell.is_multiple_of(n) {
            cell += 1;
        }
        if cell >= n * n {
            self.count += 1;
            if self.parity == 0 {
                self.even += 1;
            }
            return;
        }
        let (i, j) = (cell / n, cell % n);
        for s in 0..n {
            if (self.rows[i] | self.cols[j]) >> s & 1 == 0 {
                self.place(i, j, s);
                self.fill_skipping_column0(cell + 1);
                self.unplace(i, j, s);
            }
        }
    }
}

/// Every Latin square of order `n ≤ 4`, in lexicographic order of grids.
pub fn all_latin_squares(n: usize) -> Result<Vec<LatinSquare>> {
    if n == 0 || n > 4 {
        return Err(Error::ScaleExceeded(format!("listing squares of order {n} is not supported")));
    }
    let mut out = Vec::new();
    let mut grid = vec![vec![0usize; n]; n];
    fn rec(cell: usize, n: usize, grid: &mut Vec<Vec<usize>>, out: &mut Vec<LatinSquare>) {
        if cell == n * n {
            out.push(LatinSquare { n, grid: grid.clone() });
            return;
        }
        let (i, j) = (cell / n, cell % n);
        for s in 1..=n {
            if (0..j).all(|c| grid[i][c] != s) && (0..i).all(|r| grid[r][j] != s) {
                grid[i][j] = s;
                rec(cell + 1, n, grid, out);
            }
        }
        grid[i][j] = 0;
    }
    rec(0, n, &mut grid, &mut out);
    Ok(out)
}

/// `Σ sign` over an explicit list.
pub fn signed_count(squares: &[LatinSquare]) -> BigInt {
    squares.iter().map(|s| BigInt::from(s.sign())).fold(BigInt::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hwv::{eval_design_labeling, TripleLabeling, DEFAULT_EVAL_BUDGET};

    #[test]
    fn designs() {
        assert_eq!(latin_design(1).unwrap().degree(), 1);
        assert_eq!(latin_design(2).unwrap().degree(), 4);
        let h = latin_design(3).unwrap();
        assert_eq!(h.degree(), 9);
        assert!(h.slices(2).iter().all(|s| s.len() == 1));
        assert!(h.slices(0).iter().chain(h.slices(1)).all(|s| s.len() == 3));
        assert_eq!(h.design_type(), "3,3,3|3,3,3|9".parse().unwrap());
    }

    #[test]
    fn counts() {
        assert_eq!(count_latin_squares(1).unwrap(), BigInt::from(1));
        assert_eq!(count_latin_squares(2).unwrap(), BigInt::from(2));
        assert_eq!(count_latin_squares(3).unwrap(), BigInt::from(12));
        assert_eq!(count_latin_squares(4).unwrap(), BigInt::from(576));
        assert_eq!(count_latin_squares(5).unwrap(), BigInt::from(161280));
        for n in 1..=4 {
            assert_eq!(BigInt::from(all_latin_squares(n).unwrap().len()), count_latin_squares(n).unwrap());
        }
        assert!(matches!(count_latin_squares(7), Err(Error::ScaleExceeded(_))));
    }

    #[test]
    fn labeling_value_is_the_sign() {
        let h = latin_design(3).unwrap();
        let w = latin_target(3);
        for sq in all_latin_squares(3).unwrap() {
            let j = TripleLabeling { assignment: sq.to_labeling() };
            assert_eq!(eval_design_labeling(&h, &j, &w).unwrap(), rat(sq.sign() as i64));
        }
        // a non-Latin filling evaluates to zero
        let j = TripleLabeling { assignment: vec![0, 1, 2, 0, 1, 2, 1, 2, 0] };
        assert_eq!(eval_design_labeling(&h, &j, &w).unwrap(), rat(0));
    }

    #[test]
    fn differences() {
        for n in 1..=5 {
            let r = alon_tarsi_difference(n, Method::Both, DEFAULT_EVAL_BUDGET).unwrap();
            assert_eq!(r.eval, r.enumeration);
            if n % 2 == 1 && n > 1 {
                assert!(r.value().is_zero(), "n = {n}");
            } else {
                assert!(!r.value().is_zero(), "n = {n}");
            }
            if n <= 4 {
                assert_eq!(r.value(), &signed_count(&all_latin_squares(n).unwrap()));
            }
        }
        assert_eq!(alon_tarsi_difference(2, Method::Enumerate, 1).unwrap().value(), &BigInt::from(2));
    }

    #[test]
    fn row_swap_changes_sign_by_parity_of_n() {
        for n in 2..=4 {
            for sq in all_latin_squares(n).unwrap() {
                let sw = sq.swap_rows(0, 1);
                LatinSquare::new(sw.grid().to_vec()).unwrap();
                assert_ne!(sw, sq);
                let expect = if n % 2 == 1 { -sq.sign() } else { sq.sign() };
                assert_eq!(sw.sign(), expect);
            }
        }
    }

    #[test]
    fn rejects_non_latin_grids() {
        assert!(LatinSquare::new(vec![vec![1, 2], vec![1, 2]]).is_err());
        assert!(LatinSquare::new(vec![vec![1, 1], vec![2, 2]]).is_err());
        assert!(LatinSquare::new(vec![vec![1, 2], vec![2, 1]]).is_ok());
    }
}
