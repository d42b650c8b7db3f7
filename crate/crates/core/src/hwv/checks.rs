//! Exact checks of the highest-weight-vector properties, and the span of
//! the `f_H` of one type.

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{eval_fh, eval_fh_dense};
use crate::algebra::{PartitionTriple, QMatrix, Rational};
use crate::designs::{enumerate_designs, ObstructionDesign, SearchLimits};
use crate::error::{Error, Result};
use crate::tensors::{act, random_dense, GroupElementTriple, Rank1Decomposition};

pub const SPAN_COEFF_RANGE: i64 = 5;

/// Which evaluation engine the checks use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Labeling,
    Dense,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub lhs: Rational,
    pub rhs: Rational,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

fn evaluate(h: &ObstructionDesign, t: &Rank1Decomposition, route: Route, budget: u64) -> Result<Rational> {
    match route {
        Route::Labeling => Ok(eval_fh(h, t, budget)?.numeric().cloned().expect("numeric")),
        Route::Dense => eval_fh_dense(h, &t.to_tensor(), budget),
    }
}

/// `Π_{k,i} (α_i^(k))^{λ_i^(k)}`.
pub fn weight_factor(lambda: &PartitionTriple, alpha: &[Vec<Rational>; 3]) -> Rational {
    let mut acc = Rational::one();
    for k in 0..3 {
        for (i, &e) in lambda.components[k].parts().iter().enumerate() {
            let a = alpha[k].get(i).cloned().unwrap_or_else(Rational::one);
            for _ in 0..e {
                acc *= &a;
            }
        }
    }
    acc
}

/// `f_H(diag(α)·w)` against `Π (α_i^(k))^{λ_i^(k)} · f_H(w)` with `λ` the type of `H`.
pub fn check_weight_scaling(
    h: &ObstructionDesign,
    t: &Rank1Decomposition,
    alpha: &[Vec<Rational>; 3],
    route: Route,
    budget: u64,
) -> Result<Verdict> {
    if alpha.iter().flatten().any(Zero::is_zero) {
        return Err(Error::DimensionMismatch("scaling entries must be nonzero".into()));
    }
    let g = GroupElementTriple::new(std::array::from_fn(|k| QMatrix::diagonal(&alpha[k])))?;
    let lhs = evaluate(h, &act(&g, t)?, route, budget)?;
    let rhs = weight_factor(&h.design_type(), alpha) * evaluate(h, t, route, budget)?;
    Ok(Verdict { lhs, rhs })
}

/// `f_H(L·w)` against `f_H(w)` for lower-unitriangular `L`.
pub fn check_unipotent_invariance(
    h: &ObstructionDesign,
    t: &Rank1Decomposition,
    l: &[QMatrix; 3],
    route: Route,
    budget: u64,
) -> Result<Verdict> {
    if let Some(k) = (0..3).find(|&k| !l[k].is_lower_unitriangular()) {
        return Err(Error::DimensionMismatch(format!("L{} is not lower unitriangular", k + 1)));
    }
    let g = GroupElementTriple::new(l.clone())?;
    let lhs = evaluate(h, &act(&g, t)?, route, budget)?;
    let rhs = evaluate(h, t, route, budget)?;
    Ok(Verdict { lhs, rhs })
}

/// Rank of the matrix `(f_H(w_s))` over class representatives `H` of type `λ`
/// and seeded random integer tensors `w_s ∈ ⊗³ C^n`.
pub fn span_rank(lambda: &PartitionTriple, n: usize, samples: usize, seed: u64, limits: &SearchLimits) -> Result<usize> {
    let reps = enumerate_designs(lambda, true, limits)?;
    if reps.is_empty() {
        return Ok(0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<_> = (0..samples).map(|_| random_dense(&mut rng, [n; 3], SPAN_COEFF_RANGE)).collect();
    let rows: Vec<Result<Vec<Rational>>> = reps
        .par_iter()
        .map(|h| points.iter().map(|w| eval_fh_dense(h, w, limits.node_budget.saturating_mul(100))).collect())
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(QMatrix::from_rows(rows)?.rank())
}
