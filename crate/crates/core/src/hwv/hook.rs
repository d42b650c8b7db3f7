//! `f_{H_κ}` for the hook design by Laplace expansion of the three big
//! slices into `κ × κ` minors of the coordinate slices of `w`.
//!
//! With `R = w[·,·,1]`, `Q = w[·,1,·]`, `P = w[1,·,·]` and `N = 2κ+1`,
//! `f(w) = (κ!)³ Σ_{x,y,z} w[x,y,z] Σ_{A,B,C} ε · R[A,B] Q[A',C] P[B',C']`
//! where `A ⊂ [N]∖x` has size `κ` and `A' = [N]∖(A ∪ {x})`, and so on.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::ring::EvalRing;
use crate::algebra::linalg::{integerize, permutation_sign};
use crate::algebra::Rational;
use crate::error::{Error, Result};
use crate::tensors::SparseTensor3;

/// Upper limit on `N³·C(2κ,κ)³` multiply-adds.
pub const MAX_HOOK_WORK: u128 = 20_000_000_000;

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            rec(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `(index of A, index of A', sign of (x, A, A'))` for every `κ`-subset `A` of `[N]∖x`.
fn blocks(x: usize, n: usize, kappa: usize, index: &std::collections::HashMap<Vec<usize>, usize>) -> Vec<(usize, usize, i32)> {
    let rest: Vec<usize> = (0..n).filter(|&y| y != x).collect();
    subsets(rest.len(), kappa)
        .into_iter()
        .map(|pos| {
            let a: Vec<usize> = pos.iter().map(|&p| rest[p]).collect();
            let ac: Vec<usize> = rest.iter().copied().filter(|y| !a.contains(y)).collect();
            let mut seq = vec![x + 1];
            seq.extend(a.iter().map(|&y| y + 1));
            seq.extend(ac.iter().map(|&y| y + 1));
            (index[&a], index[&ac], permutation_sign(&seq))
        })
        .collect()
}

fn signed<R: EvalRing>(x: &R, s: i32) -> Option<R> {
    if s < 0 {
        x.neg()
    } else {
        Some(x.clone())
    }
}

struct Contraction<'a, R> {
    w: &'a [Vec<Vec<R>>],
    minors: [Vec<Vec<R>>; 3],
    blocks: Vec<Vec<(usize, usize, i32)>>,
}

impl<R: EvalRing + Send + Sync> Contraction<'_, R> {
    fn inner(&self, x: usize, y: usize, z: usize) -> Option<R> {
        let [r, q, p] = &self.minors;
        let (ba, bb, bc) = (&self.blocks[x], &self.blocks[y], &self.blocks[z]);
        let zero = self.w[0][0][0].zero_like();
        // XY[a][c] = Σ_b sA sB R[A,B] · sC P[B',C']
        let mut total = zero.clone();
        for &(ai, aci, sa) in ba {
            let row: Vec<R> = bb
                .iter()
                .map(|&(bi, _, sb)| signed(&r[ai][bi], sa * sb))
                .collect::<Option<_>>()?;
            for &(ci, cci, sc) in bc {
                let qv = &q[aci][ci];
                if qv.is_zero() {
                    continue;
                }
                let mut acc = zero.clone();
                for (rv, &(_, bci, _)) in row.iter().zip(bb) {
                    if rv.is_zero() {
                        continue;
                    }
                    acc = acc.add(&rv.mul(&p[bci][cci])?)?;
                }
                total = total.add(&signed(&acc.mul(qv)?, sc)?)?;
            }
        }
        Some(total)
    }

    fn run(&self, n: usize) -> Option<R> {
        let triples: Vec<(usize, usize, usize)> = (0..n)
            .flat_map(|x| (0..n).flat_map(move |y| (0..n).map(move |z| (x, y, z))))
            .filter(|&(x, y, z)| !self.w[x][y][z].is_zero())
            .collect();
        let parts: Vec<Option<R>> = triples
            .par_iter()
            .map(|&(x, y, z)| self.w[x][y][z].mul(&self.inner(x, y, z)?))
            .collect();
        let mut total = self.w[0][0][0].zero_like();
        for part in parts {
            total = total.add(&part?)?;
        }
        Some(total)
    }
}

fn minors<R: EvalRing>(m: &[Vec<R>], subs: &[Vec<usize>], one: &R) -> Option<Vec<Vec<R>>> {
    subs.iter()
        .map(|a| {
            subs.iter()
                .map(|b| {
                    let cols: Vec<Vec<R>> = b.iter().map(|&j| a.iter().map(|&i| m[i][j].clone()).collect()).collect();
                    let refs: Vec<&[R]> = cols.iter().map(Vec::as_slice).collect();
                    R::det(&refs, one)
                })
                .collect()
        })
        .collect()
}

fn contract<R: EvalRing + Send + Sync>(w: Vec<Vec<Vec<R>>>, kappa: usize, one: &R) -> Option<R> {
    let n = 2 * kappa + 1;
    let subs = subsets(n, kappa);
    let index = subs.iter().enumerate().map(|(t, s)| (s.clone(), t)).collect();
    let slice = |f: &dyn Fn(usize, usize) -> R| -> Vec<Vec<R>> { (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect() };
    let r = slice(&|i, j| w[i][j][0].clone());
    let q = slice(&|i, k| w[i][0][k].clone());
    let p = slice(&|j, k| w[0][j][k].clone());
    let c = Contraction {
        w: &w,
        minors: [minors(&r, &subs, one)?, minors(&q, &subs, one)?, minors(&p, &subs, one)?],
        blocks: (0..n).map(|x| blocks(x, n, kappa, &index)).collect(),
    };
    c.run(n)
}

/// `f_{H_κ}(w)` for `w ∈ C^{n1} ⊗ C^{n2} ⊗ C^{n3}` with every `n_k ≥ 2κ+1`.
///
/// The hook design's points are taken in lexicographic order, so the value
/// agrees with `eval_fh` on `matmul::hook_design(κ)`.
pub fn eval_fh_hook(kappa: usize, w: &SparseTensor3) -> Result<Rational> {
    let n = 2 * kappa + 1;
    if let Some(&dim) = w.dims().iter().find(|&&dim| dim < n) {
        return Err(Error::BlockTooLarge { size: n, dim });
    }
    let work = (n as u128).pow(3) * binomial(2 * kappa, kappa).pow(3);
    if work > MAX_HOOK_WORK {
        return Err(Error::ScaleExceeded(format!("hook route for κ = {kappa} needs {work} operations")));
    }
    // f is homogeneous of degree d = 3κ+1 in w
    let values: Vec<Rational> = w.entries().map(|(_, v)| v.clone()).collect();
    let (_, l) = integerize(&values);
    let mut big = vec![vec![vec![BigInt::zero(); n]; n]; n];
    for (idx, v) in w.entries() {
        if idx.iter().all(|&i| i <= n) {
            big[idx[0] - 1][idx[1] - 1][idx[2] - 1] = (v * Rational::from_integer(l.clone())).to_integer();
        }
    }
    let fact: BigInt = (1..=kappa).map(BigInt::from).product();
    let small: Option<Vec<Vec<Vec<i128>>>> = big
        .iter()
        .map(|a| a.iter().map(|b| b.iter().map(|x| i128::try_from(x).ok()).collect()).collect())
        .collect();
    let fast = small.and_then(|s| contract(s, kappa, &1i128)).map(BigInt::from);
    let value = match fast {
        Some(v) => v,
        None => contract(big, kappa, &BigInt::one()).expect("exact"),
    };
    let scale = l.pow((3 * kappa + 1) as u32);
    Ok(Rational::new(value * fact.pow(3), scale))
}
