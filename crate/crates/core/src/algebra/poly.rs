//! Sparse multivariate polynomials over `Z` and exact determinants of
//! polynomial matrices.
//!
//! Exponent vectors have a fixed arity. For the matrix-multiplication
//! pipeline the arity is `3m` and variable `X_i^(k)` lives at index
//! `(k-1)*m + (i-1)` (see [`var_index`]).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Index of `X_i^(k)` (1-based `k`, `i`) in an exponent vector of arity `3m`.
pub fn var_index(m: usize, k: usize, i: usize) -> usize {
    (k - 1) * m + (i - 1)
}

pub type Exponents = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Exponents, BigInt>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigInt::one())
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        let mut e = vec![0; nvars];
        e[idx] = 1;
        Self::monomial(e, BigInt::one())
    }

    pub fn monomial(exps: Exponents, c: BigInt) -> Self {
        let mut p = Self::zero(exps.len());
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(e, c)| c.is_one() && e.iter().all(|&x| x == 0))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigInt)> {
        self.terms.iter()
    }

    /// Coefficient of the given monomial (zero if absent).
    pub fn coefficient(&self, monomial: &[u32]) -> BigInt {
        self.terms.get(monomial).cloned().unwrap_or_default()
    }

    /// Constant term, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => {
                let (e, c) = self.terms.iter().next()?;
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Leading term under lexicographic order with `x_0 > x_1 > ...`.
    fn leading(&self) -> Option<(&Exponents, &BigInt)> {
        self.terms.iter().next_back()
    }

    fn add_term(&mut self, e: Exponents, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigInt) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Substitute integer values for all variables.
    pub fn evaluate(&self, values: &[BigInt]) -> BigInt {
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in values.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Exact quotient `self / divisor`, or `None` if the division leaves a remainder.
    pub fn div_exact(&self, divisor: &MultiPoly) -> Option<MultiPoly> {
        let (le, lc) = divisor.leading()?;
        let (le, lc) = (le.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero(self.nvars);
        while let Some((re, rc)) = rem.leading() {
            if re.iter().zip(&le).any(|(a, b)| a < b) {
                return None;
            }
            let (qc, r) = rc.div_rem(&lc);
            if !r.is_zero() {
                return None;
            }
            let qe: Exponents = re.iter().zip(&le).map(|(a, b)| a - b).collect();
            let step = MultiPoly::monomial(qe.clone(), qc.clone());
            rem = &rem - &(&step * divisor);
            quot.add_term(qe, qc);
        }
        Some(quot)
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { format!("x{i}") } else { format!("x{i}^{k}") })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{mag}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars.max(rhs.nvars));
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

/// Dense rectangular matrix of polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<MultiPoly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize, nvars: usize) -> Self {
        PolyMatrix { rows, cols, entries: vec![MultiPoly::zero(nvars); rows * cols] }
    }

    pub fn identity(n: usize, nvars: usize) -> Self {
        let mut m = Self::zeros(n, n, nvars);
        for i in 0..n {
            m.set(i, i, MultiPoly::one(nvars));
        }
        m
    }

    pub fn from_ints(rows: &[Vec<i64>], nvars: usize) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c, nvars);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, MultiPoly::constant(nvars, BigInt::from(v)));
            }
        }
        m
    }

    /// Builds a matrix from its columns.
    pub fn from_columns(rows: usize, columns: Vec<Vec<MultiPoly>>, nvars: usize) -> Self {
        let cols = columns.len();
        let mut m = Self::zeros(rows, cols, nvars);
        for (j, col) in columns.into_iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, v) in col.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &MultiPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: MultiPoly) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<MultiPoly> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn swap_columns(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// Substitute integer values for every variable.
    pub fn evaluate(&self, values: &[BigInt]) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).evaluate(values)).collect())
            .collect()
    }
}

const COFACTOR_LIMIT: usize = 5;

/// Exact determinant of a square polynomial matrix.
///
/// Rows and columns holding a single nonzero entry are expanded first;
/// what remains is expanded by cofactors below 5x5 and by Bareiss
/// fraction-free elimination otherwise.
pub fn poly_det(m: &PolyMatrix) -> Result<MultiPoly> {
    if m.rows != m.cols {
        return Err(Error::NonSquare { rows: m.rows, cols: m.cols });
    }
    let nvars = m.entries.first().map_or(0, MultiPoly::nvars);
    let grid: Vec<Vec<MultiPoly>> = (0..m.rows)
        .map(|i| (0..m.cols).map(|j| m.get(i, j).clone()).collect())
        .collect();
    Ok(det_rec(grid, nvars))
}

fn remove(grid: &mut Vec<Vec<MultiPoly>>, r: usize, c: usize) {
    grid.remove(r);
    for row in grid.iter_mut() {
        row.remove(c);
    }
}

fn det_rec(mut grid: Vec<Vec<MultiPoly>>, nvars: usize) -> MultiPoly {
    let mut factor = MultiPoly::one(nvars);
    loop {
        let n = grid.len();
        if n == 0 {
            return factor;
        }
        // column or row with at most one nonzero entry
        let mut reduced = false;
        for c in 0..n {
            let nz: Vec<usize> = (0..n).filter(|&r| !grid[r][c].is_zero()).collect();
            match nz.len() {
                0 => return MultiPoly::zero(nvars),
                1 => {
                    let r = nz[0];
                    let e = grid[r][c].clone();
                    factor = if (r + c).is_multiple_of(2) { &factor * &e } else { -&(&factor * &e) };
                    remove(&mut grid, r, c);
                    reduced = true;
                    break;
                }
                _ => {}
            }
        }
        if reduced {
            continue;
        }
        for r in 0..n {
            let nz: Vec<usize> = (0..n).filter(|&c| !grid[r][c].is_zero()).collect();
            match nz.len() {
                0 => return MultiPoly::zero(nvars),
                1 => {
                    let c = nz[0];
                    let e = grid[r][c].clone();
                    factor = if (r + c).is_multiple_of(2) { &factor * &e } else { -&(&factor * &e) };
                    remove(&mut grid, r, c);
                    reduced = true;
                    break;
                }
                _ => {}
            }
        }
        if reduced {
            continue;
        }
        let rest = if n < COFACTOR_LIMIT { cofactor(&grid, nvars) } else { bareiss(grid, nvars) };
        return &factor * &rest;
    }
}

fn cofactor(grid: &[Vec<MultiPoly>], nvars: usize) -> MultiPoly {
    let n = grid.len();
    if n == 1 {
        return grid[0][0].clone();
    }
    // sparsest column
    let c = (0..n)
        .min_by_key(|&c| (0..n).filter(|&r| !grid[r][c].is_zero()).count())
        .unwrap_or(0);
    let mut acc = MultiPoly::zero(nvars);
    for r in 0..n {
        if grid[r][c].is_zero() {
            continue;
        }
        let mut minor = grid.to_vec();
        remove(&mut minor, r, c);
        let term = &grid[r][c] * &det_rec(minor, nvars);
        acc = if (r + c) % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

fn bareiss(mut a: Vec<Vec<MultiPoly>>, nvars: usize) -> MultiPoly {
    let n = a.len();
    let mut negate = false;
    let mut prev = MultiPoly::one(nvars);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return MultiPoly::zero(nvars),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num
                    .div_exact(&prev)
                    .expect("Bareiss step must divide exactly");
            }
            a[i][k] = MultiPoly::zero(nvars);
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -&d
    } else {
        d
    }
}
