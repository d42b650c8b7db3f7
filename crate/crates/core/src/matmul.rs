//! Border-rank lower bounds for the matrix multiplication tensor `M_m`
//! (`m` odd) through the hook design `H_κ`, `κ = (m²−1)/2`.
//!
//! `f_{H_κ}(A·M_m)` is evaluated for a symbolic matrix triple `A` with
//! entries affine-linear in `X_i^(k)`, and the coefficient of one monomial
//! `X` is extracted. The labelings contributing to `X` are classified by
//! valid sets `S ⊆ O_m`; a certificate requires every valid set to
//! contribute the same coefficient, and [`hook_coefficient`] reports
//! `CancellationDetected` otherwise.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::algebra::{var_index, MultiPoly, PartitionTriple, Partition, PolyMatrix, QMatrix, Rational};
use crate::bounds::{chromatic_index_exact_with, symbolic_witness, BoundCertificate, ChromaticLimits};
use crate::designs::ObstructionDesign;
use crate::error::{Error, Result};
use crate::hwv::{eval_design_labeling_poly, TripleLabeling};
use crate::tensors::{mamu_label, mamu_tensor, Rank1Decomposition};

pub const MAX_COEFFICIENT_M: usize = 7;
pub const MAX_VALID_SET_M: usize = 11;

/// A matrix position `(i, j)`, 1-based.
pub type Pair = [usize; 2];

fn check_odd(m: usize) -> Result<()> {
    if m.is_multiple_of(2) || m == 0 {
        return Err(Error::DimensionMismatch(format!("m = {m} must be odd")));
    }
    Ok(())
}

pub fn center(m: usize) -> usize {
    m.div_ceil(2)
}

/// `ī = m + 1 − i`.
pub fn bar(m: usize, i: usize) -> usize {
    m + 1 - i
}

/// `O_m = [m]² ∖ {(a,a)}` in row-major order.
pub fn o_m(m: usize) -> Vec<Pair> {
    let a = center(m);
    (1..=m).flat_map(|i| (1..=m).map(move |j| [i, j])).filter(|&p| p != [a, a]).collect()
}

/// The quarter turn `τ(ij) = (j ī)`.
pub fn tau(m: usize, p: Pair) -> Pair {
    [p[1], bar(m, p[0])]
}

pub fn tau_set(m: usize, s: &BTreeSet<Pair>) -> BTreeSet<Pair> {
    s.iter().map(|&p| tau(m, p)).collect()
}

/// Complement in `O_m`.
pub fn iota(m: usize, s: &BTreeSet<Pair>) -> BTreeSet<Pair> {
    o_m(m).into_iter().filter(|p| !s.contains(p)).collect()
}

// ---- hook design ----

/// `H_κ`: the three axes through `y⁰ = (1,1,1)` in `[κ+1]³`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HookDesign {
    pub kappa: usize,
    pub design: ObstructionDesign,
    pub center: usize,
    /// `V^(k)`: points whose slice in direction `k` is a singleton.
    pub classes: [Vec<usize>; 3],
}

pub fn hook_design(kappa: usize) -> Result<HookDesign> {
    if kappa == 0 {
        return Err(Error::InvalidDesign("κ must be positive".into()));
    }
    let mut pts = vec![[1, 1, 1]];
    for i in 2..=kappa + 1 {
        pts.extend([[i, 1, 1], [1, i, 1], [1, 1, i]]);
    }
    let design = ObstructionDesign::from_points(pts)?;
    let center = design.points().iter().position(|&p| p == [1, 1, 1]).expect("center");
    let classes = std::array::from_fn(|k| (0..design.degree()).filter(|&p| design.points()[p][k] != 1).collect());
    Ok(HookDesign { kappa, design, center, classes })
}

/// `λ(κ)`: three copies of the hook `(κ+1, 1^{2κ})`.
pub fn hook_type(kappa: usize) -> PartitionTriple {
    let mut parts = vec![kappa + 1];
    parts.extend(std::iter::repeat_n(1, 2 * kappa));
    let p = Partition::new(parts).expect("partition");
    PartitionTriple::new(p.clone(), p.clone(), p)
}

/// True iff `h` is equivalent to `H_κ`: its type is `λ(κ)`, the three big
/// slices meet in one point and every other point lies in exactly two of them.
pub fn is_hook(h: &ObstructionDesign, kappa: usize) -> bool {
    if h.degree() != 3 * kappa + 1 || h.design_type() != hook_type(kappa) {
        return false;
    }
    let big: Vec<usize> = (0..3)
        .map(|k| h.slices(k).iter().position(|s| s.len() == 2 * kappa + 1).expect("big slice"))
        .collect();
    let mut centers = 0;
    for p in 0..h.degree() {
        match (0..3).filter(|&k| h.slice_of(p, k) == big[k]).count() {
            3 => centers += 1,
            2 => {}
            _ => return false,
        }
    }
    centers == 1
}

/// The `m` with `h ≅ H_{(m²−1)/2}` and `target = M_m`.
pub fn recognize_hook_and_mamu(h: &ObstructionDesign, target: &Rank1Decomposition) -> Result<usize> {
    let n = target.dims()[0];
    let m = (1..=n).find(|&m| m * m == n).filter(|&m| m % 2 == 1 && m >= 3 && target.dims() == [n; 3]);
    let Some(m) = m else {
        return Err(Error::DimensionMismatch(format!("dims {:?} are not (m², m², m²) with m odd", target.dims())));
    };
    if target.to_tensor() != mamu_tensor(m).0 {
        return Err(Error::DimensionMismatch(format!("target is not the {m}x{m} matrix multiplication tensor")));
    }
    let kappa = (m * m - 1) / 2;
    if !is_hook(h, kappa) {
        return Err(Error::InvalidDesign(format!("design is not the hook design H_{kappa}")));
    }
    Ok(m)
}

// ---- the matrix triple ----

/// `A = (A^(1), A^(2), A^(3))`, each `m² × m²`, rows indexed by `|1⟩`
/// followed by `|φ(p)⟩` for `p ∈ O_m`.
#[derive(Clone, Debug)]
pub struct MatrixTripleA {
    pub m: usize,
    /// `phi[t]` is the pair sent to row `t + 2`.
    pub phi: Vec<Pair>,
    pub matrices: [PolyMatrix; 3],
}

impl MatrixTripleA {
    /// `φ` in row-major order on `O_m`.
    pub fn new(m: usize) -> Result<Self> {
        Self::with_phi(m, o_m(m))
    }

    pub fn with_phi(m: usize, phi: Vec<Pair>) -> Result<Self> {
        check_odd(m)?;
        let mut sorted = phi.clone();
        sorted.sort_unstable();
        if sorted != o_m(m) {
            return Err(Error::DimensionMismatch("φ must be a bijection O_m → {2,…,m²}".into()));
        }
        let n = m * m;
        let nv = 3 * m;
        let a = center(m);
        let row_of = |p: Pair| phi.iter().position(|&q| q == p).expect("pair") + 1;
        let matrices = std::array::from_fn(|k| {
            let mut mat = PolyMatrix::zeros(n, n, nv);
            for i in 1..=m {
                for j in 1..=m {
                    let col = (i - 1) * m + (j - 1);
                    let x = MultiPoly::var(nv, var_index(m, k + 1, i));
                    if i == a && j == a {
                        mat.set(0, col, x);
                    } else {
                        mat.set(row_of([i, j]), col, MultiPoly::one(nv));
                        if j == bar(m, i) {
                            mat.set(0, col, x);
                        }
                    }
                }
            }
            mat
        });
        Ok(MatrixTripleA { m, phi, matrices })
    }

    pub fn nvars(&self) -> usize {
        3 * self.m
    }

    /// `A^(k)|ij⟩` (0-based `k`).
    pub fn column(&self, k: usize, p: Pair) -> Vec<MultiPoly> {
        self.matrices[k].column((p[0] - 1) * self.m + (p[1] - 1))
    }

    /// The matrices at `X_a^(k) = 1`, other variables 0.
    pub fn specialize_at_center(&self) -> [QMatrix; 3] {
        let mut values = vec![BigInt::zero(); self.nvars()];
        for k in 1..=3 {
            values[var_index(self.m, k, center(self.m))] = BigInt::one();
        }
        std::array::from_fn(|k| {
            let rows = self.matrices[k]
                .evaluate(&values)
                .into_iter()
                .map(|r| r.into_iter().map(Rational::from_integer).collect())
                .collect();
            QMatrix::from_rows(rows).expect("rectangular")
        })
    }

    /// `columns[k][t] = A^(k)·(k-th vector of the t-th triple of M_m)`.
    pub fn mamu_columns(&self) -> [Vec<Vec<MultiPoly>>; 3] {
        let m = self.m;
        let mut cols: [Vec<Vec<MultiPoly>>; 3] = Default::default();
        for i in 1..=m {
            for j in 1..=m {
                for l in 1..=m {
                    cols[0].push(self.column(0, [i, j]));
                    cols[1].push(self.column(1, [j, l]));
                    cols[2].push(self.column(2, [l, i]));
                }
            }
        }
        cols
    }
}

/// Exponents of `X = Π_k X_a^(k) Π_i (X_i^(k))^{|i−ī|}` in `3m` variables.
pub fn target_monomial(m: usize) -> Result<Vec<u32>> {
    check_odd(m)?;
    let mut e = vec![0u32; 3 * m];
    for k in 1..=3 {
        for i in 1..=m {
            e[var_index(m, k, i)] = i.abs_diff(bar(m, i)) as u32;
        }
        e[var_index(m, k, center(m))] = 1;
    }
    Ok(e)
}

// ---- valid sets ----

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ValidSet {
    pub m: usize,
    pub set: BTreeSet<Pair>,
}

/// `|S| = κ`, `τ(S) = ι(S)` and row `i` of `S` has `|i − ī|` elements.
pub fn is_valid(m: usize, s: &BTreeSet<Pair>) -> bool {
    if m.is_multiple_of(2) || s.len() != (m * m - 1) / 2 {
        return false;
    }
    let om: BTreeSet<Pair> = o_m(m).into_iter().collect();
    if !s.is_subset(&om) || tau_set(m, s) != iota(m, s) {
        return false;
    }
    (1..=m).all(|i| s.iter().filter(|p| p[0] == i).count() == i.abs_diff(bar(m, i)))
}

impl ValidSet {
    pub fn new(m: usize, set: BTreeSet<Pair>) -> Result<Self> {
        if !is_valid(m, &set) {
            return Err(Error::InvalidSet(format!("{set:?} is not a valid subset of O_{m}")));
        }
        Ok(ValidSet { m, set })
    }

    pub fn pairs(&self) -> Vec<Pair> {
        self.set.iter().copied().collect()
    }
}

/// All valid sets: the forced region plus one binary choice per `i ≤ (m−1)/2`.
pub fn enumerate_valid_sets(m: usize) -> Result<Vec<ValidSet>> {
    check_odd(m)?;
    if m > MAX_VALID_SET_M {
        return Err(Error::ScaleExceeded(format!("m = {m} exceeds {MAX_VALID_SET_M}")));
    }
    let mut forced = BTreeSet::new();
    for [i, j] in o_m(m) {
        let jb = bar(m, j);
        if (i < j && i < jb) || (i > j && i > jb) {
            forced.insert([i, j]);
        }
    }
    let half = (m - 1) / 2;
    let mut out = Vec::with_capacity(1 << half);
    for mask in 0u32..(1 << half) {
        let mut s = forced.clone();
        for i in 1..=half {
            let ib = bar(m, i);
            if mask >> (i - 1) & 1 == 0 {
                s.extend([[i, i], [ib, ib]]);
            } else {
                s.extend([[i, ib], [ib, i]]);
            }
        }
        out.push(ValidSet::new(m, s)?);
    }
    out.sort();
    Ok(out)
}

// ---- labelings ----

/// The labeling with `J^(1)(V^(3)) = S`: `y⁰ ↦ ⟨aaa⟩`, `V^(3)` gets `⟨i j ī⟩`
/// for `(ij) ∈ S`, `V^(1)` gets `⟨p̄ p q⟩` for `(pq) ∈ ιτ(S)` and `V^(2)`
/// gets `⟨q p̄ p⟩` for `(pq) ∈ ιτιτ(S)`, each class in point order.
pub fn canonical_labeling(s: &ValidSet, hook: &HookDesign) -> Result<TripleLabeling> {
    let m = s.m;
    if !is_valid(m, &s.set) {
        return Err(Error::InvalidSet(format!("{:?} is not a valid subset of O_{m}", s.set)));
    }
    if hook.kappa != (m * m - 1) / 2 {
        return Err(Error::DimensionMismatch(format!("H_{} does not match m = {m}", hook.kappa)));
    }
    let a = center(m);
    let j2v1 = iota(m, &tau_set(m, &s.set));
    let j3v2 = iota(m, &tau_set(m, &j2v1));
    let v3: Vec<usize> = s.set.iter().map(|&[i, j]| mamu_label(m, i, j, bar(m, i))).collect();
    let v1: Vec<usize> = j2v1.iter().map(|&[p, q]| mamu_label(m, bar(m, p), p, q)).collect();
    let v2: Vec<usize> = j3v2.iter().map(|&[p, q]| mamu_label(m, q, bar(m, p), p)).collect();
    let mut assignment = vec![0; hook.design.degree()];
    assignment[hook.center] = mamu_label(m, a, a, a);
    for (class, labels) in hook.classes.iter().zip([v1, v2, v3]) {
        for (&p, l) in class.iter().zip(labels) {
            assignment[p] = l;
        }
    }
    let j = TripleLabeling { assignment };
    if !is_bijective_on_big_slices(hook, m, &j) {
        return Err(Error::InvalidSet("labeling is not bijective on the big slices".into()));
    }
    Ok(j)
}

/// `(|ij⟩, |jl⟩, |li⟩)` for the `M_m` label `t`.
pub fn label_pairs(m: usize, t: usize) -> [Pair; 3] {
    let (i, j, l) = (t / (m * m) + 1, (t / m) % m + 1, t % m + 1);
    [[i, j], [j, l], [l, i]]
}

/// `J^(k)` injective on the big slice `e^(k)` for every `k`.
pub fn is_bijective_on_big_slices(hook: &HookDesign, m: usize, j: &TripleLabeling) -> bool {
    (0..3).all(|k| {
        let mut seen = BTreeSet::new();
        (0..hook.design.degree())
            .filter(|p| !hook.classes[k].contains(p))
            .all(|p| seen.insert(label_pairs(m, j.assignment[p])[k]))
    })
}

/// A random labeling by `M_m` triples, bijective on every big slice, with
/// `J(y⁰) ≠ ⟨aaa⟩`; `None` if the randomized search gives up.
pub fn random_off_center_labeling<R: Rng>(hook: &HookDesign, m: usize, rng: &mut R) -> Option<TripleLabeling> {
    let d = hook.design.degree();
    let aaa = mamu_label(m, center(m), center(m), center(m));
    let mut labels: Vec<usize> = (0..m * m * m).collect();
    'attempt: for _ in 0..1000 {
        let mut assignment = vec![usize::MAX; d];
        let mut used: [BTreeSet<Pair>; 3] = Default::default();
        let mut order: Vec<usize> = (0..d).filter(|&p| p != hook.center).collect();
        order.insert(0, hook.center);
        for p in order {
            labels.shuffle(rng);
            let in_big: Vec<usize> = (0..3).filter(|&k| !hook.classes[k].contains(&p)).collect();
            let pick = labels.iter().copied().find(|&t| {
                let pairs = label_pairs(m, t);
                !(p == hook.center && t == aaa) && in_big.iter().all(|&k| !used[k].contains(&pairs[k]))
            });
            let Some(t) = pick else {
                continue 'attempt;
            };
            let pairs = label_pairs(m, t);
            for &k in &in_big {
                used[k].insert(pairs[k]);
            }
            assignment[p] = t;
        }
        return Some(TripleLabeling { assignment });
    }
    None
}

/// `J∘σ` for a random `σ` preserving every `V^(k)`.
pub fn permute_within_classes<R: Rng>(hook: &HookDesign, j: &TripleLabeling, rng: &mut R) -> TripleLabeling {
    let mut assignment = j.assignment.clone();
    for class in &hook.classes {
        let mut perm = class.clone();
        perm.shuffle(rng);
        for (&p, &q) in class.iter().zip(&perm) {
            assignment[p] = j.assignment[q];
        }
    }
    TripleLabeling { assignment }
}

/// `eval_H(A·J)` as a polynomial.
pub fn eval_symbolic(hook: &HookDesign, a: &MatrixTripleA, columns: &[Vec<Vec<MultiPoly>>; 3], j: &TripleLabeling) -> Result<MultiPoly> {
    eval_design_labeling_poly(&hook.design, j, columns, a.nvars())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HookCoefficient {
    pub m: usize,
    pub monomial: Vec<u32>,
    /// Coefficient of `X` in `eval_H(A·J_S)`, per valid set `S` in order.
    pub per_set: Vec<(Vec<Pair>, BigInt)>,
    /// `(κ!)³`, the number of labelings `J_S∘σ` per valid set.
    pub symmetry_factor: BigInt,
    /// Coefficient of `X` in `f_H(A·M_m)`.
    pub total: BigInt,
}

pub fn hook_coefficient(m: usize) -> Result<HookCoefficient> {
    hook_coefficient_with(&MatrixTripleA::new(m)?)
}

/// Coefficient of `X` in `eval_H(A·J_S)` for every valid set `S`, in order.
pub fn valid_set_coefficients(a: &MatrixTripleA) -> Result<Vec<(Vec<Pair>, BigInt)>> {
    let m = a.m;
    if !(3..=MAX_COEFFICIENT_M).contains(&m) {
        return Err(Error::ScaleExceeded(format!("m = {m} outside 3..={MAX_COEFFICIENT_M}")));
    }
    let hook = hook_design((m * m - 1) / 2)?;
    let monomial = target_monomial(m)?;
    let columns = a.mamu_columns();
    enumerate_valid_sets(m)?
        .par_iter()
        .map(|s| {
            let j = canonical_labeling(s, &hook)?;
            for class in &hook.classes {
                let labels: BTreeSet<usize> = class.iter().map(|&p| j.assignment[p]).collect();
                if labels.len() != class.len() {
                    return Err(Error::InvalidSet("repeated labels within a class".into()));
                }
            }
            let poly = eval_symbolic(&hook, a, &columns, &j)?;
            Ok((s.pairs(), poly.coefficient(&monomial)))
        })
        .collect()
}

/// `(κ!)³`, the number of labelings `J_S∘σ` for each valid set.
pub fn symmetry_factor(m: usize) -> BigInt {
    let kappa = (m * m - 1) / 2;
    let fact: BigUint = (1..=kappa as u64).map(BigUint::from).product();
    BigInt::from(fact.pow(3))
}

/// Fails with `CancellationDetected` unless every valid set contributes
/// the same coefficient.
pub fn hook_coefficient_with(a: &MatrixTripleA) -> Result<HookCoefficient> {
    let m = a.m;
    let per_set = valid_set_coefficients(a)?;
    let common = per_set[0].1.clone();
    if let Some((s, c)) = per_set.iter().find(|(_, c)| *c != common) {
        return Err(Error::CancellationDetected(format!(
            "set {:?} has coefficient {common}, set {s:?} has {c}",
            per_set[0].0
        )));
    }
    if common.is_zero() {
        return Err(Error::WitnessVanished);
    }
    let symmetry_factor = symmetry_factor(m);
    let total = &symmetry_factor * BigInt::from(per_set.len()) * &common;
    Ok(HookCoefficient { m, monomial: target_monomial(m)?, per_set, symmetry_factor, total })
}

/// `R̲(M_m) ≥ 3κ + 1 = (3m² − 1)/2` for odd `m ∈ [3, 7]`.
pub fn matmul_bound(m: usize) -> Result<BoundCertificate> {
    check_odd(m)?;
    if !(3..=MAX_COEFFICIENT_M).contains(&m) {
        return Err(Error::ScaleExceeded(format!("m = {m} outside 3..={MAX_COEFFICIENT_M}")));
    }
    let hook = hook_design((m * m - 1) / 2)?;
    let chrom = chromatic_index_exact_with(&hook.design, &ChromaticLimits::default())?;
    Ok(BoundCertificate {
        design: hook.design.to_json(),
        chromatic_index: chrom.index,
        optimal_coloring: chrom.coloring.colors,
        clique: chrom.clique,
        witness: symbolic_witness(m)?,
        implied_bound: chrom.index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::check_certificate;
    use crate::bounds::CertifyOptions;
    use crate::designs::{canonical_form, enumerate_designs, SearchLimits};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hook_designs() {
        let h1 = hook_design(1).unwrap();
        assert_eq!(h1.design.degree(), 4);
        assert_eq!(h1.design.design_type(), "2,1,1|2,1,1|2,1,1".parse().unwrap());
        let h4 = hook_design(4).unwrap();
        assert_eq!(h4.design.degree(), 13);
        for k in 0..3 {
            assert_eq!(h4.design.max_slice_size_in(k), 9);
            assert_eq!(h4.classes[k].len(), 4);
        }
        assert_eq!(crate::bounds::chromatic_index_exact(&hook_design(2).unwrap().design).unwrap().0, 7);
        assert!(is_hook(&h4.design, 4));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(is_hook(&h4.design.random_equivalent(&mut rng), 4));
        // the hook is the only design of its type
        let reps = enumerate_designs(&hook_type(2), true, &SearchLimits::default()).unwrap();
        assert_eq!(reps, vec![canonical_form(&hook_design(2).unwrap().design).unwrap().design]);
    }

    #[test]
    fn tau_and_iota() {
        for m in [1, 3, 5, 7] {
            let om = o_m(m);
            assert_eq!(om.len(), m * m - 1);
            for &p in &om {
                let q = tau(m, tau(m, tau(m, tau(m, p))));
                assert_eq!(q, p);
                assert_ne!(tau(m, p), [center(m); 2]);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(m as u64);
            for _ in 0..20 {
                let s: BTreeSet<Pair> = om.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
                assert_eq!(tau_set(m, &iota(m, &s)), iota(m, &tau_set(m, &s)));
            }
        }
    }

    #[test]
    fn matrix_triple_columns() {
        let a = MatrixTripleA::new(3).unwrap();
        let nv = 9;
        let x = |k: usize, i: usize| MultiPoly::var(nv, var_index(3, k, i));
        let unit = |r: usize| -> Vec<MultiPoly> {
            (0..9).map(|t| if t == r { MultiPoly::one(nv) } else { MultiPoly::zero(nv) }).collect()
        };
        let mut c22 = vec![MultiPoly::zero(nv); 9];
        c22[0] = x(1, 2);
        assert_eq!(a.column(0, [2, 2]), c22);
        let phi = |p: Pair| o_m(3).iter().position(|&q| q == p).unwrap() + 1;
        let mut c13 = unit(phi([1, 3]));
        c13[0] = x(1, 1);
        assert_eq!(a.column(0, [1, 3]), c13);
        assert_eq!(a.column(0, [1, 2]), unit(phi([1, 2])));
        for m in [3, 5, 7] {
            let a = MatrixTripleA::new(m).unwrap();
            for q in a.specialize_at_center() {
                assert_eq!(q.rank(), m * m);
            }
        }
        assert!(MatrixTripleA::new(4).is_err());
    }

    #[test]
    fn monomials() {
        let e = target_monomial(3).unwrap();
        assert_eq!(e.iter().sum::<u32>(), 15);
        for k in 1..=3 {
            assert_eq!(e[var_index(3, k, 2)], 1);
            assert_eq!(e[var_index(3, k, 1)], 2);
            assert_eq!(e[var_index(3, k, 3)], 2);
        }
        assert_eq!(target_monomial(1).unwrap().iter().sum::<u32>(), 3);
        assert_eq!(target_monomial(5).unwrap().iter().sum::<u32>(), 39);
    }

    /// Every κ-subset of `O_m`, filtered by the definition.
    fn brute_valid_sets(m: usize) -> Vec<ValidSet> {
        let om = o_m(m);
        let n = om.len();
        let kappa = n / 2;
        let mut out = Vec::new();
        let mut mask: u64 = (1 << kappa) - 1;
        while mask < 1 << n {
            let s: BTreeSet<Pair> = (0..n).filter(|&b| mask >> b & 1 == 1).map(|b| om[b]).collect();
            if is_valid(m, &s) {
                out.push(ValidSet { m, set: s });
            }
            // next subset of the same size
            let c = mask & mask.wrapping_neg();
            let r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
        out.sort();
        out
    }

    #[test]
    fn valid_sets() {
        assert_eq!(enumerate_valid_sets(3).unwrap().len(), 2);
        assert_eq!(enumerate_valid_sets(5).unwrap().len(), 4);
        assert_eq!(enumerate_valid_sets(9).unwrap().len(), 16);
        for m in [3, 5] {
            assert_eq!(enumerate_valid_sets(m).unwrap(), brute_valid_sets(m));
        }
        for m in [3, 5, 7, 9, 11] {
            for s in enumerate_valid_sets(m).unwrap() {
                assert!(is_valid(m, &s.set));
            }
        }
        assert!(matches!(ValidSet::new(3, BTreeSet::from([[1, 1]])), Err(Error::InvalidSet(_))));
    }

    #[test]
    fn canonical_labelings() {
        let hook = hook_design(4).unwrap();
        for s in enumerate_valid_sets(3).unwrap() {
            let j = canonical_labeling(&s, &hook).unwrap();
            assert_eq!(j.assignment[hook.center], mamu_label(3, 2, 2, 2));
            let mut v1: Vec<Pair> = hook.classes[0].iter().map(|&p| label_pairs(3, j.assignment[p])[0]).collect();
            v1.sort_unstable();
            assert_eq!(v1, vec![[1, 3], [1, 3], [3, 1], [3, 1]]);
            let v3: BTreeSet<Pair> = hook.classes[2].iter().map(|&p| label_pairs(3, j.assignment[p])[0]).collect();
            assert_eq!(v3, s.set);
        }
        for m in [5, 7] {
            let hook = hook_design((m * m - 1) / 2).unwrap();
            for s in enumerate_valid_sets(m).unwrap() {
                canonical_labeling(&s, &hook).unwrap();
            }
        }
        let bad = ValidSet { m: 3, set: BTreeSet::from([[1, 1]]) };
        assert!(matches!(canonical_labeling(&bad, &hook), Err(Error::InvalidSet(_))));
    }

    #[test]
    fn within_class_invariance() {
        let hook = hook_design(4).unwrap();
        let a = MatrixTripleA::new(3).unwrap();
        let cols = a.mamu_columns();
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for s in enumerate_valid_sets(3).unwrap() {
            let j = canonical_labeling(&s, &hook).unwrap();
            let base = eval_symbolic(&hook, &a, &cols, &j).unwrap();
            assert!(!base.is_zero());
            for _ in 0..20 {
                let js = permute_within_classes(&hook, &j, &mut rng);
                assert_eq!(eval_symbolic(&hook, &a, &cols, &js).unwrap(), base);
            }
        }
    }

    #[test]
    fn off_center_labelings_miss_the_monomial() {
        let hook = hook_design(4).unwrap();
        let a = MatrixTripleA::new(3).unwrap();
        let cols = a.mamu_columns();
        let x = target_monomial(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        for _ in 0..1000 {
            let j = random_off_center_labeling(&hook, 3, &mut rng).expect("labeling");
            assert!(is_bijective_on_big_slices(&hook, 3, &j));
            assert_ne!(j.assignment[hook.center], mamu_label(3, 2, 2, 2));
            let p = eval_symbolic(&hook, &a, &cols, &j).unwrap();
            assert!(p.coefficient(&x).is_zero());
        }
    }

    #[test]
    fn valid_set_contributions_cancel() {
        for m in [3, 5] {
            let per_set = valid_set_coefficients(&MatrixTripleA::new(m).unwrap()).unwrap();
            assert_eq!(per_set.len(), 1 << ((m - 1) / 2));
            assert!(per_set.iter().all(|(_, c)| c.magnitude() == &BigUint::one()));
            let sum: BigInt = per_set.iter().map(|(_, c)| c).sum();
            assert!(sum.is_zero(), "m = {m}");
            assert!(matches!(hook_coefficient(m), Err(Error::CancellationDetected(_))));
        }
        let base: Vec<BigInt> = valid_set_coefficients(&MatrixTripleA::new(3).unwrap()).unwrap().into_iter().map(|x| x.1).collect();
        assert_eq!(base, vec![BigInt::from(-1), BigInt::from(1)]);
        // φ only permutes rows of every A^(k)
        let mut phi = o_m(3);
        phi.reverse();
        let alt: Vec<BigInt> =
            valid_set_coefficients(&MatrixTripleA::with_phi(3, phi).unwrap()).unwrap().into_iter().map(|x| x.1).collect();
        let neg: Vec<BigInt> = base.iter().map(|c| -c).collect();
        assert!(alt == base || alt == neg);
        assert!(matches!(hook_coefficient(9), Err(Error::ScaleExceeded(_))));
        assert_eq!(symmetry_factor(3), BigInt::from(24u64.pow(3)));
    }

    #[test]
    fn hook_polynomial_on_the_mamu_orbit() {
        use crate::hwv::eval_fh_hook;
        use crate::tensors::{act, random_invertible, random_low_rank_with, GroupElementTriple};
        let (_, m3) = mamu_tensor(3);
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        assert!(eval_fh_hook(4, &m3.to_tensor()).unwrap().is_zero());
        for _ in 0..2 {
            let g = GroupElementTriple::new(std::array::from_fn(|_| random_invertible(&mut rng, 9, 2))).unwrap();
            assert!(eval_fh_hook(4, &act(&g, &m3).unwrap().to_tensor()).unwrap().is_zero());
        }
        let (t12, _) = random_low_rank_with(&mut rng, [9; 3], 12, 2);
        assert!(eval_fh_hook(4, &t12).unwrap().is_zero());
        let (t13, _) = random_low_rank_with(&mut rng, [9; 3], 13, 2);
        assert!(!eval_fh_hook(4, &t13).unwrap().is_zero());
    }

    #[test]
    fn matmul_bound_reports_the_cancellation() {
        assert!(matches!(matmul_bound(3), Err(Error::CancellationDetected(_))));
        assert!(matches!(matmul_bound(4), Err(Error::DimensionMismatch(_))));
        let (_, dec) = mamu_tensor(3);
        let h = hook_design(4).unwrap().design;
        assert_eq!(recognize_hook_and_mamu(&h, &dec).unwrap(), 3);
        assert!(recognize_hook_and_mamu(&hook_design(3).unwrap().design, &dec).is_err());
        let opts = CertifyOptions { strategy: crate::bounds::Strategy::Symbolic, ..CertifyOptions::default() };
        assert!(matches!(
            crate::bounds::certify_lower_bound(&h, &dec, &opts),
            Err(Error::CancellationDetected(_))
        ));
    }

    #[test]
    fn forged_symbolic_certificate_is_rejected() {
        use crate::bounds::{Coloring, Witness};
        use crate::tensors::TensorJson;
        let hook = hook_design(4).unwrap();
        let chrom = chromatic_index_exact_with(&hook.design, &ChromaticLimits::default()).unwrap();
        let (t, dec) = mamu_tensor(3);
        let cert = BoundCertificate {
            design: hook.design.to_json(),
            chromatic_index: chrom.index,
            optimal_coloring: chrom.coloring.colors.clone(),
            clique: chrom.clique,
            witness: Witness::Symbolic {
                m: 3,
                target: TensorJson::from_parts(&t, Some(&dec)),
                monomial: target_monomial(3).unwrap(),
                per_valid_set: Vec::new(),
                symmetry_factor: symmetry_factor(3).to_string(),
                total: "27648".into(),
            },
            implied_bound: 13,
        };
        assert!((Coloring { colors: chrom.coloring.colors }).is_proper(&hook.design));
        assert!(check_certificate(&cert, &CertifyOptions::default()).is_err());
    }
}
