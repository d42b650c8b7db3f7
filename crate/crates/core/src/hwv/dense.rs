//! `f_H(w)` from tensor entries.
//!
//! Expanding each slice determinant over bijections `σ_e: e → [|e|]` and
//! summing over labelings first gives
//! `f_H(w) = Σ_σ Π_k Π_e sgn(σ_e) Π_{s∈H} w[σ¹(s), σ²(s), σ³(s)]`.
//! The bijections of one direction are summed back into determinants, so
//! only the other two directions are enumerated.

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use super::labeling::Plan;
use super::ring::EvalRing;
use crate::algebra::linalg::common_denominator;
use crate::algebra::Rational;
use crate::designs::ObstructionDesign;
use crate::error::{Error, Result};
use crate::tensors::SparseTensor3;

struct Dense<'a, R> {
    plan: &'a Plan,
    /// absorbed direction and the two enumerated ones
    a: usize,
    bc: [usize; 2],
    dims: [usize; 3],
    w: Vec<R>,
    one: R,
    budget: u64,
}

struct State<R> {
    rows: Vec<[usize; 3]>,
    /// used rows of every slice in the enumerated directions, per point
    used: Vec<[u64; 2]>,
    sum: R,
    nodes: u64,
}

impl<R: EvalRing> Dense<'_, R> {
    fn entry(&self, idx: [usize; 3]) -> &R {
        &self.w[(idx[0] * self.dims[1] + idx[1]) * self.dims[2] + idx[2]]
    }

    /// `used[k]` of the slice through `p` is shared by every member; we
    /// store it on the slice's first point.
    fn owner(&self, p: usize, k: usize) -> usize {
        self.plan.earlier[p][k].first().copied().unwrap_or(p)
    }

    fn dfs(&self, p: usize, acc: &R, odd: bool, st: &mut State<R>) -> Result<Option<()>> {
        if p == self.plan.d {
            let term = if odd { acc.neg() } else { Some(acc.clone()) };
            st.sum = match term.and_then(|t| st.sum.add(&t)) {
                Some(s) => s,
                None => return Ok(None),
            };
            return Ok(Some(()));
        }
        let [b, c] = self.bc;
        let (ob, oc) = (self.owner(p, b), self.owner(p, c));
        let (sb, sc, sa) = (self.plan.size[p][b], self.plan.size[p][c], self.plan.size[p][self.a]);
        for rb in 0..sb {
            if st.used[ob][0] >> rb & 1 == 1 {
                continue;
            }
            for rc in 0..sc {
                if st.used[oc][1] >> rc & 1 == 1 {
                    continue;
                }
                st.nodes += 1;
                if st.nodes > self.budget {
                    return Err(Error::LimitExceeded { budget: self.budget });
                }
                let mut idx = [0; 3];
                idx[b] = rb;
                idx[c] = rc;
                if (0..sa).all(|ra| {
                    idx[self.a] = ra;
                    self.entry(idx).is_zero()
                }) {
                    continue;
                }
                let inv = (st.used[ob][0] >> (rb + 1)).count_ones() + (st.used[oc][1] >> (rc + 1)).count_ones();
                st.rows[p] = idx;
                st.used[ob][0] |= 1 << rb;
                st.used[oc][1] |= 1 << rc;
                let mut next = Some(acc.clone());
                for (k, members) in &self.plan.completes[p] {
                    if *k != self.a {
                        continue;
                    }
                    let cols: Vec<Vec<R>> = members
                        .iter()
                        .map(|&q| {
                            (0..members.len())
                                .map(|ra| {
                                    let mut i = st.rows[q];
                                    i[self.a] = ra;
                                    self.entry(i).clone()
                                })
                                .collect()
                        })
                        .collect();
                    let refs: Vec<&[R]> = cols.iter().map(Vec::as_slice).collect();
                    next = next.and_then(|n| R::det(&refs, &self.one).and_then(|det| n.mul(&det)));
                }
                let r = match next {
                    None => Ok(None),
                    Some(n) if n.is_zero() => Ok(Some(())),
                    Some(n) => self.dfs(p + 1, &n, odd ^ (inv % 2 == 1), st),
                };
                st.used[ob][0] &= !(1 << rb);
                st.used[oc][1] &= !(1 << rc);
                if r?.is_none() {
                    return Ok(None);
                }
            }
        }
        Ok(Some(()))
    }

    fn run(&self) -> Result<Option<R>> {
        let d = self.plan.d;
        let mut st =
            State { rows: vec![[0; 3]; d], used: vec![[0; 2]; d], sum: self.one.zero_like(), nodes: 0 };
        Ok(self.dfs(0, &self.one, false, &mut st)?.map(|_| st.sum))
    }
}

fn log_factorial_product(h: &ObstructionDesign, k: usize) -> f64 {
    h.slices(k).iter().map(|s| (1..=s.len()).map(|i| (i as f64).ln()).sum::<f64>()).sum()
}

/// `f_H(w)` from the entries of `w`, exactly.
pub fn eval_fh_dense(h: &ObstructionDesign, w: &SparseTensor3, budget: u64) -> Result<Rational> {
    let dims = w.dims();
    for k in 0..3 {
        let s = h.max_slice_size_in(k);
        if s > dims[k] {
            return Err(Error::BlockTooLarge { size: s, dim: dims[k] });
        }
        if s > 64 {
            return Err(Error::ScaleExceeded(format!("slice of size {s}")));
        }
    }
    if h.degree() == 0 {
        return Ok(Rational::one());
    }
    let den = common_denominator(w.entries().map(|(_, v)| v));
    let mut big = vec![BigInt::zero(); dims.iter().product()];
    for (idx, v) in w.entries() {
        big[((idx[0] - 1) * dims[1] + idx[1] - 1) * dims[2] + idx[2] - 1] = v.numer() * (&den / v.denom());
    }
    // absorb the direction whose enumeration would be largest
    let a = (0..3)
        .max_by(|&x, &y| log_factorial_product(h, x).total_cmp(&log_factorial_product(h, y)).then(y.cmp(&x)))
        .unwrap();
    let bc = match a {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    };
    let plan = Plan::new(h);
    let fast: Option<Vec<i128>> = big.iter().map(|x| i128::try_from(x).ok()).collect();
    let value = match fast.and_then(|w| {
        let e = Dense { plan: &plan, a, bc, dims, w, one: 1i128, budget };
        e.run().transpose()
    }) {
        Some(r) => BigInt::from(r?),
        None => {
            let e = Dense { plan: &plan, a, bc, dims, w: big, one: BigInt::one(), budget };
            e.run()?.expect("BigInt arithmetic does not overflow")
        }
    };
    let scale: BigInt = Pow::pow(&den, h.degree());
    Ok(Rational::new(value, scale))
}
