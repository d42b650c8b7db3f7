//! The labeling sum `f_H(w) = Σ_{J: H → T} eval_H(J)` as a pruned
//! depth-first search over points in global order.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use num_traits::Zero;
use rayon::prelude::*;

use super::ring::EvalRing;
use crate::algebra::Rational;
use crate::designs::ObstructionDesign;
use crate::error::{Error, Result};

/// Slice bookkeeping derived from a design.
pub(crate) struct Plan {
    pub d: usize,
    /// size of the k-slice through each point
    pub size: Vec<[usize; 3]>,
    /// earlier points sharing the k-slice of each point
    pub earlier: Vec<[Vec<usize>; 3]>,
    /// (direction, members) of the slices whose last point is `p`
    pub completes: Vec<Vec<(usize, Vec<usize>)>>,
}

impl Plan {
    pub fn new(h: &ObstructionDesign) -> Self {
        let d = h.degree();
        let mut size = vec![[0; 3]; d];
        let mut earlier: Vec<[Vec<usize>; 3]> = vec![Default::default(); d];
        let mut completes = vec![Vec::new(); d];
        for k in 0..3 {
            for slice in h.slices(k) {
                for (pos, &p) in slice.iter().enumerate() {
                    size[p][k] = slice.len();
                    earlier[p][k] = slice[..pos].to_vec();
                }
                completes[*slice.last().expect("nonempty slice")].push((k, slice.clone()));
            }
        }
        Plan { d, size, earlier, completes }
    }
}

pub const ZERO_CLASS: usize = usize::MAX;

/// Class ids of the truncations of each label's k-vector to its first `s`
/// entries, up to scaling; `ZERO_CLASS` marks a zero truncation.
pub(crate) fn parallel_classes(vectors: &[Vec<Rational>], max_size: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); max_size + 1];
    for (s, classes) in out.iter_mut().enumerate().skip(1) {
        let mut ids: BTreeMap<Vec<Rational>, usize> = BTreeMap::new();
        for v in vectors {
            let trunc = &v[..s.min(v.len())];
            let id = match trunc.iter().find(|x| !x.is_zero()) {
                None => ZERO_CLASS,
                Some(lead) => {
                    let normalized: Vec<Rational> = trunc.iter().map(|x| x / lead).collect();
                    let next = ids.len();
                    *ids.entry(normalized).or_insert(next)
                }
            };
            classes.push(id);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    pub visited: u64,
    pub pruned: u64,
}

impl Counters {
    fn merge(&mut self, o: Counters) {
        self.visited += o.visited;
        self.pruned += o.pruned;
    }
}

pub(crate) struct Search<'a, R> {
    pub plan: &'a Plan,
    /// `cols[k][t]`: k-th vector of label `t`
    pub cols: &'a [Vec<Vec<R>>; 3],
    /// `classes[k][s][t]`
    pub classes: &'a [Vec<Vec<usize>>; 3],
    pub one: R,
    pub nodes: &'a AtomicU64,
    pub budget: u64,
}

struct Out<R> {
    sum: R,
    counters: Counters,
    prefixes: Option<Vec<(Vec<usize>, R)>>,
}

impl<R: EvalRing> Search<'_, R> {
    fn labels(&self) -> usize {
        self.cols[0].len()
    }

    /// `Ok(None)` signals ring overflow.
    fn dfs(&self, labels: &mut Vec<usize>, acc: &R, stop: usize, out: &mut Out<R>) -> Result<Option<()>> {
        let p = labels.len();
        if p == stop {
            match &mut out.prefixes {
                Some(list) => list.push((labels.clone(), acc.clone())),
                None => {
                    out.counters.visited += 1;
                    out.sum = match out.sum.add(acc) {
                        Some(s) => s,
                        None => return Ok(None),
                    };
                }
            }
            return Ok(Some(()));
        }
        'label: for t in 0..self.labels() {
            if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
                return Err(Error::LimitExceeded { budget: self.budget });
            }
            for k in 0..3 {
                let cls = &self.classes[k][self.plan.size[p][k]];
                let c = cls[t];
                if c == ZERO_CLASS || self.plan.earlier[p][k].iter().any(|&q| cls[labels[q]] == c) {
                    out.counters.pruned += 1;
                    continue 'label;
                }
            }
            labels.push(t);
            let mut next = acc.clone();
            for (k, members) in &self.plan.completes[p] {
                let cols: Vec<&[R]> = members.iter().map(|&q| self.cols[*k][labels[q]].as_slice()).collect();
                let Some(det) = R::det(&cols, &self.one) else {
                    return Ok(None);
                };
                if det.is_zero() {
                    out.counters.pruned += 1;
                    labels.pop();
                    continue 'label;
                }
                next = match next.mul(&det) {
                    Some(v) => v,
                    None => return Ok(None),
                };
            }
            let r = self.dfs(labels, &next, stop, out);
            labels.pop();
            if r?.is_none() {
                return Ok(None);
            }
        }
        Ok(Some(()))
    }

    /// Exact labeling sum, sharded on label prefixes of the first points.
    pub fn run(&self) -> Result<Option<(R, Counters)>> {
        let d = self.plan.d;
        let zero = self.one.zero_like();
        if d == 0 {
            return Ok(Some((self.one.clone(), Counters { visited: 1, pruned: 0 })));
        }
        let r = self.labels();
        let mut depth = 0;
        let mut shards = 1usize;
        while depth < d && shards < SHARDS {
            depth += 1;
            shards = shards.saturating_mul(r.max(1));
        }
        let depth = depth.min(d - 1);
        let mut head = Out { sum: zero.clone(), counters: Counters::default(), prefixes: Some(Vec::new()) };
        if self.dfs(&mut Vec::new(), &self.one, depth, &mut head)?.is_none() {
            return Ok(None);
        }
        let prefixes = head.prefixes.take().unwrap_or_default();
        let parts: Vec<Result<Option<Out<R>>>> = prefixes
            .into_par_iter()
            .map(|(mut labels, acc)| {
                let mut out = Out { sum: zero.clone(), counters: Counters::default(), prefixes: None };
                Ok(self.dfs(&mut labels, &acc, d, &mut out)?.map(|_| out))
            })
            .collect();
        if self.nodes.load(Ordering::Relaxed) > self.budget {
            return Err(Error::LimitExceeded { budget: self.budget });
        }
        let mut sum = zero;
        let mut counters = head.counters;
        for part in parts {
            let Some(out) = part? else {
                return Ok(None);
            };
            sum = match sum.add(&out.sum) {
                Some(s) => s,
                None => return Ok(None),
            };
            counters.merge(out.counters);
        }
        Ok(Some((sum, counters)))
    }
}

/// Number of label prefixes the search aims to split into.
const SHARDS: usize = 256;
