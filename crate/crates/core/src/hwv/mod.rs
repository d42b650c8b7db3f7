//! Evaluation of the polynomials `f_H` and the operational properties of
//! highest weight vectors.
//!
//! Two independent routes compute `f_H(w)`:
//! - [`eval_fh`] sums `eval_H(J)` over labelings `J: H → T` of the points
//!   by triples of a rank-one decomposition;
//! - [`eval_fh_dense`] expands every slice determinant into permutations,
//!   which turns the labeling sum into products of tensor entries.
//!
//! For hook designs [`eval_fh_hook`] contracts minors of the coordinate
//! slices instead, which reaches `H_4` on `9 × 9 × 9` tensors.

mod checks;
mod dense;
mod general;
mod hook;
mod kron;
mod labeling;
pub mod ring;

use std::sync::atomic::AtomicU64;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Zero};
use serde::Serialize;

use crate::algebra::linalg::integerize;
use crate::algebra::{det_columns, var_index, MultiPoly, Rational};
use crate::designs::{ObstructionDesign, SetPartitionTriple};
use crate::error::{Error, Result};
use crate::tensors::Rank1Decomposition;

pub use checks::{
    check_unipotent_invariance, check_weight_scaling, span_rank, weight_factor, Route, Verdict,
};
pub use dense::eval_fh_dense;
pub use general::{eval_fh_general_argument, GeneralArgument};
pub use hook::eval_fh_hook;
pub use kron::{character, kronecker_coefficient};
pub use labeling::Counters;

use labeling::{parallel_classes, Plan, Search};

pub const DEFAULT_EVAL_BUDGET: u64 = 1_000_000_000;

/// `J`: label index (into a decomposition) of every design point, in point order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TripleLabeling {
    pub assignment: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Numeric(Rational),
    Symbolic(MultiPoly),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvaluationResult {
    pub value: Value,
    pub labelings_visited: u64,
    pub labelings_pruned: u64,
}

impl EvaluationResult {
    pub fn numeric(&self) -> Option<&Rational> {
        match &self.value {
            Value::Numeric(r) => Some(r),
            Value::Symbolic(_) => None,
        }
    }
}

/// `eval_Λ(J) = Π_{e∈Λ} det J|_e`, using the first `|e|` rows and the
/// block's columns in increasing element order.
pub fn eval_set_partition(blocks: &[Vec<usize>], vectors: &[Vec<Rational>]) -> Result<Rational> {
    let n = vectors.first().map_or(0, Vec::len);
    let mut acc = Rational::one();
    for block in blocks {
        if block.len() > n {
            return Err(Error::BlockTooLarge { size: block.len(), dim: n });
        }
        let mut b = block.clone();
        b.sort_unstable();
        let cols: Vec<Vec<Rational>> = b.iter().map(|&e| vectors[e - 1][..block.len()].to_vec()).collect();
        acc *= det_columns(&cols);
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

fn check_blocks(h: &ObstructionDesign, dims: [usize; 3]) -> Result<()> {
    for k in 0..3 {
        let s = h.max_slice_size_in(k);
        if s > dims[k] {
            return Err(Error::BlockTooLarge { size: s, dim: dims[k] });
        }
    }
    Ok(())
}

/// `eval_H(J) = Π_k eval_{E^(k)}(J^(k))` for a labeling by decomposition triples.
pub fn eval_design_labeling(h: &ObstructionDesign, j: &TripleLabeling, t: &Rank1Decomposition) -> Result<Rational> {
    check_labeling(h, j, t.triples().len())?;
    check_blocks(h, t.dims())?;
    let sp = h.to_set_partitions();
    let mut acc = Rational::one();
    for k in 0..3 {
        let vectors: Vec<Vec<Rational>> = j.assignment.iter().map(|&l| t.triples()[l][k].clone()).collect();
        acc *= eval_set_partition(sp.blocks(k), &vectors)?;
    }
    Ok(acc)
}

/// Symbolic `eval_H(J)`: `columns[k][t]` is the k-th (polynomial) vector of label `t`.
pub fn eval_design_labeling_poly(
    h: &ObstructionDesign,
    j: &TripleLabeling,
    columns: &[Vec<Vec<MultiPoly>>; 3],
    nvars: usize,
) -> Result<MultiPoly> {
    check_labeling(h, j, columns[0].len())?;
    let one = MultiPoly::one(nvars);
    let mut acc = one.clone();
    for k in 0..3 {
        let dim = columns[k].first().map_or(0, Vec::len);
        for slice in h.slices(k) {
            if slice.len() > dim {
                return Err(Error::BlockTooLarge { size: slice.len(), dim });
            }
            let cols: Vec<&[MultiPoly]> = slice.iter().map(|&p| columns[k][j.assignment[p]].as_slice()).collect();
            let det = <MultiPoly as ring::EvalRing>::det(&cols, &one).expect("exact");
            if det.is_zero() {
                return Ok(MultiPoly::zero(nvars));
            }
            acc = &acc * &det;
        }
    }
    Ok(acc)
}

fn check_labeling(h: &ObstructionDesign, j: &TripleLabeling, r: usize) -> Result<()> {
    if j.assignment.len() != h.degree() {
        return Err(Error::DimensionMismatch(format!(
            "labeling has {} entries for {} points",
            j.assignment.len(),
            h.degree()
        )));
    }
    if let Some(&bad) = j.assignment.iter().find(|&&l| l >= r) {
        return Err(Error::DimensionMismatch(format!("label {bad} out of range for {r} triples")));
    }
    Ok(())
}

/// Integer triples representing `L·w`, with the scale `L`.
fn integer_triples(t: &Rank1Decomposition) -> ([Vec<Vec<BigInt>>; 3], BigInt) {
    let mut parts = Vec::with_capacity(t.triples().len());
    let mut l = BigInt::one();
    for tr in t.triples() {
        let (u, a) = integerize(&tr[0]);
        let (v, b) = integerize(&tr[1]);
        let (x, c) = integerize(&tr[2]);
        let dt = a * b * c;
        l = l.lcm(&dt);
        parts.push((u, v, x, dt));
    }
    let mut cols: [Vec<Vec<BigInt>>; 3] = Default::default();
    for (u, v, x, dt) in parts {
        let f = &l / &dt;
        cols[0].push(u.into_iter().map(|e| e * &f).collect());
        cols[1].push(v);
        cols[2].push(x);
    }
    (cols, l)
}

fn to_i128(cols: &[Vec<Vec<BigInt>>; 3]) -> Option<[Vec<Vec<i128>>; 3]> {
    let conv = |c: &Vec<Vec<BigInt>>| -> Option<Vec<Vec<i128>>> {
        c.iter().map(|v| v.iter().map(|x| i128::try_from(x).ok()).collect()).collect()
    };
    Some([conv(&cols[0])?, conv(&cols[1])?, conv(&cols[2])?])
}

fn classes_of(t: &Rank1Decomposition) -> [Vec<Vec<usize>>; 3] {
    std::array::from_fn(|k| {
        let vecs: Vec<Vec<Rational>> = t.triples().iter().map(|tr| tr[k].clone()).collect();
        parallel_classes(&vecs, t.dims()[k])
    })
}

/// `f_H(w) = Σ_{J: H→T} eval_H(J)` over the triples of `t`, exactly.
pub fn eval_fh(h: &ObstructionDesign, t: &Rank1Decomposition, budget: u64) -> Result<EvaluationResult> {
    check_blocks(h, t.dims())?;
    let plan = Plan::new(h);
    let classes = classes_of(t);
    let (big, l) = integer_triples(t);
    let run_fast = || -> Result<Option<(BigInt, Counters)>> {
        let Some(cols) = to_i128(&big) else {
            return Ok(None);
        };
        let nodes = AtomicU64::new(0);
        let s = Search { plan: &plan, cols: &cols, classes: &classes, one: 1i128, nodes: &nodes, budget };
        Ok(s.run()?.map(|(v, c)| (BigInt::from(v), c)))
    };
    let (value, counters) = match run_fast()? {
        Some(r) => r,
        None => {
            let nodes = AtomicU64::new(0);
            let s = Search { plan: &plan, cols: &big, classes: &classes, one: BigInt::one(), nodes: &nodes, budget };
            s.run()?.expect("BigInt arithmetic does not overflow")
        }
    };
    let scale: BigInt = Pow::pow(&l, h.degree());
    Ok(EvaluationResult {
        value: Value::Numeric(Rational::new(value, scale)),
        labelings_visited: counters.visited,
        labelings_pruned: counters.pruned,
    })
}

/// `f_H(diag(X)·w)` as a polynomial in `X_i^(k)` (arity `3n`, `n` the
/// largest ambient dimension); by the weight property this is
/// `f_H(w)·Π (X_i^(k))^{λ_i^(k)}`. Requires an integer decomposition.
pub fn eval_fh_symbolic(h: &ObstructionDesign, t: &Rank1Decomposition, budget: u64) -> Result<EvaluationResult> {
    check_blocks(h, t.dims())?;
    let (big, l) = integer_triples(t);
    if !l.is_one() {
        return Err(Error::DimensionMismatch("symbolic evaluation needs integer vectors".into()));
    }
    let n = *t.dims().iter().max().unwrap_or(&0);
    let nvars = 3 * n;
    let cols: [Vec<Vec<MultiPoly>>; 3] = std::array::from_fn(|k| {
        big[k]
            .iter()
            .map(|v| {
                v.iter()
                    .enumerate()
                    .map(|(i, c)| MultiPoly::var(nvars, var_index(n, k + 1, i + 1)).scale(c))
                    .collect()
            })
            .collect()
    });
    let plan = Plan::new(h);
    let classes = classes_of(t);
    let nodes = AtomicU64::new(0);
    let s = Search { plan: &plan, cols: &cols, classes: &classes, one: MultiPoly::one(nvars), nodes: &nodes, budget };
    let (value, counters) = s.run()?.expect("exact ring");
    Ok(EvaluationResult {
        value: Value::Symbolic(value),
        labelings_visited: counters.visited,
        labelings_pruned: counters.pruned,
    })
}

/// The design `from_set_partitions(S)`, evaluated on `w` by labelings.
pub fn eval_fh_set_partitions(s: &SetPartitionTriple, t: &Rank1Decomposition, budget: u64) -> Result<Rational> {
    let h = s.to_design()?;
    Ok(eval_fh(&h, t, budget)?.numeric().cloned().expect("numeric"))
}
