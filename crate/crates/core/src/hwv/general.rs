//! `(eval ⊗ eval ⊗ eval) ∘ P_d` on arbitrary, not necessarily symmetric,
//! elements of `⊗^d ⊗³ C^n`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::algebra::linalg::permutation_sign;
use crate::algebra::Rational;
use crate::designs::SetPartitionTriple;
use crate::error::{Error, Result};
use crate::tensors::SparseTensor3;

pub const MAX_DEGREE: usize = 4;
pub const MAX_DIM: usize = 3;

/// A sparse element of `⊗^d (C^n ⊗ C^n ⊗ C^n)`; each key lists one
/// 1-based index triple per tensor factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralArgument {
    pub n: usize,
    pub d: usize,
    pub entries: BTreeMap<Vec<[usize; 3]>, Rational>,
}

impl GeneralArgument {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if d > MAX_DEGREE || n > MAX_DIM {
            return Err(Error::ScaleExceeded(format!(
                "general arguments need d <= {MAX_DEGREE} and n <= {MAX_DIM}, got d = {d}, n = {n}"
            )));
        }
        Ok(GeneralArgument { n, d, entries: BTreeMap::new() })
    }

    pub fn basis(n: usize, x: Vec<[usize; 3]>) -> Result<Self> {
        let mut g = Self::new(n, x.len())?;
        g.add(x, Rational::one())?;
        Ok(g)
    }

    pub fn add(&mut self, x: Vec<[usize; 3]>, v: Rational) -> Result<()> {
        if x.len() != self.d || x.iter().flatten().any(|&i| i == 0 || i > self.n) {
            return Err(Error::DimensionMismatch(format!("index {x:?} outside (({0})^3)^{1}", self.n, self.d)));
        }
        let e = self.entries.entry(x.clone()).or_insert_with(Rational::zero);
        *e += v;
        if e.is_zero() {
            self.entries.remove(&x);
        }
        Ok(())
    }

    /// `w^{⊗d}` for a tensor in `⊗³ C^n`.
    pub fn power(w: &SparseTensor3, d: usize) -> Result<Self> {
        let n = w.dims()[0];
        if w.dims() != [n; 3] {
            return Err(Error::DimensionMismatch("power needs a cubic tensor".into()));
        }
        let mut g = Self::new(n, d)?;
        let support: Vec<([usize; 3], Rational)> = w.entries().map(|(i, v)| (*i, v.clone())).collect();
        let mut cur: Vec<(Vec<[usize; 3]>, Rational)> = vec![(Vec::new(), Rational::one())];
        for _ in 0..d {
            cur = cur
                .into_iter()
                .flat_map(|(x, v)| {
                    support.iter().map(move |(i, c)| {
                        let mut y = x.clone();
                        y.push(*i);
                        (y, &v * c)
                    })
                })
                .collect();
        }
        for (x, v) in cur {
            g.add(x, v)?;
        }
        Ok(g)
    }
}

/// `eval_Λ¹ ⊗ eval_Λ² ⊗ eval_Λ³` on one basis element `x`.
fn basis_eval(s: &SetPartitionTriple, x: &[[usize; 3]]) -> i32 {
    let mut sign = 1;
    for k in 0..3 {
        for block in s.blocks(k) {
            let rows: Vec<usize> = block.iter().map(|&e| x[e - 1][k]).collect();
            if rows.iter().any(|&r| r > block.len()) {
                return 0;
            }
            let mut seen = vec![false; block.len() + 1];
            for &r in &rows {
                if seen[r] {
                    return 0;
                }
                seen[r] = true;
            }
            sign *= permutation_sign(&rows);
        }
    }
    sign
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    if d == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(d - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, d - 1);
            out.push(q);
        }
    }
    out
}

/// `(eval_{Λ¹} ⊗ eval_{Λ²} ⊗ eval_{Λ³})(P_d t)` with `P_d = (1/d!) Σ_π π`.
pub fn eval_fh_general_argument(s: &SetPartitionTriple, t: &GeneralArgument) -> Result<Rational> {
    if s.d() != t.d {
        return Err(Error::DimensionMismatch(format!("S has d = {}, argument has d = {}", s.d(), t.d)));
    }
    for k in 0..3 {
        if let Some(b) = s.blocks(k).iter().find(|b| b.len() > t.n) {
            return Err(Error::BlockTooLarge { size: b.len(), dim: t.n });
        }
    }
    let perms = permutations(t.d);
    let mut acc = Rational::zero();
    for (x, v) in &t.entries {
        let mut c = 0i64;
        for p in &perms {
            let y: Vec<[usize; 3]> = p.iter().map(|&i| x[i]).collect();
            c += basis_eval(s, &y) as i64;
        }
        if c != 0 {
            acc += v * Rational::from_integer(c.into());
        }
    }
    Ok(acc / Rational::from_integer(perms.len().into()))
}
