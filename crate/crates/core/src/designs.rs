//! Obstruction designs: finite point sets in a 3D box, their slices and
//! types, equivalence up to slice permutations, and exhaustive search for
//! designs of a prescribed type.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigUint;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Partition, PartitionTriple};
use crate::error::{Error, Result};

pub type Point = [usize; 3];

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;
pub const DEFAULT_MAX_DEGREE: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObstructionDesign {
    bbox: [usize; 3],
    points: Vec<Point>,
    /// `slices[k]` lists the nonempty k-slices by increasing coordinate;
    /// each slice is a sorted list of point indices.
    slices: [Vec<Vec<usize>>; 3],
    /// `slice_of[p][k]` is the index into `slices[k]` containing point `p`.
    slice_of: Vec<[usize; 3]>,
}

impl ObstructionDesign {
    /// Builds a design from points (1-based, any order) inside `bbox`.
    pub fn new(bbox: [usize; 3], mut points: Vec<Point>) -> Result<Self> {
        for p in &points {
            if (0..3).any(|k| p[k] == 0 || p[k] > bbox[k]) {
                return Err(Error::InvalidDesign(format!("point {p:?} outside box {bbox:?}")));
            }
        }
        points.sort_unstable();
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidDesign(format!("duplicate point {:?}", w[0])));
        }
        let mut slice_of = vec![[0usize; 3]; points.len()];
        let slices = std::array::from_fn(|k| {
            let mut by_coord: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (idx, p) in points.iter().enumerate() {
                by_coord.entry(p[k]).or_default().push(idx);
            }
            let slices: Vec<Vec<usize>> = by_coord.into_values().collect();
            for (s, slice) in slices.iter().enumerate() {
                for &p in slice {
                    slice_of[p][k] = s;
                }
            }
            slices
        });
        Ok(ObstructionDesign { bbox, points, slices, slice_of })
    }

    /// Uses the smallest box containing the points.
    pub fn from_points(points: Vec<Point>) -> Result<Self> {
        let bbox = std::array::from_fn(|k| points.iter().map(|p| p[k]).max().unwrap_or(0));
        Self::new(bbox, points)
    }

    pub fn bbox(&self) -> [usize; 3] {
        self.bbox
    }

    /// Points in global lexicographic order.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// `d = |H|`.
    pub fn degree(&self) -> usize {
        self.points.len()
    }

    pub fn slices(&self, k: usize) -> &[Vec<usize>] {
        &self.slices[k]
    }

    pub fn slice_of(&self, point: usize, k: usize) -> usize {
        self.slice_of[point][k]
    }

    /// Slice sizes in direction `k` by increasing coordinate.
    pub fn marginal(&self, k: usize) -> Vec<usize> {
        self.slices[k].iter().map(Vec::len).collect()
    }

    pub fn sorted_marginal(&self, k: usize) -> Partition {
        Partition::from_unsorted(self.marginal(k))
    }

    /// `λ^(k)` is the transpose of the sorted k-marginal.
    pub fn design_type(&self) -> PartitionTriple {
        let [a, b, c] = [0, 1, 2].map(|k| self.sorted_marginal(k).transpose());
        PartitionTriple::new(a, b, c)
    }

    pub fn max_slice_size(&self) -> usize {
        self.slices.iter().flatten().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_slice_size_in(&self, k: usize) -> usize {
        self.slices[k].iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Two distinct points conflict if they share a slice in some direction.
    pub fn conflict(&self, p: usize, q: usize) -> bool {
        p != q && (0..3).any(|k| self.slice_of[p][k] == self.slice_of[q][k])
    }

    pub fn conflict_degree(&self, p: usize) -> usize {
        (0..self.degree()).filter(|&q| self.conflict(p, q)).count()
    }

    /// The three slice partitions on ground set `{1..d}` (point `i` ↦ element `i+1`).
    pub fn to_set_partitions(&self) -> SetPartitionTriple {
        let blocks = std::array::from_fn(|k| {
            self.slices[k].iter().map(|s| s.iter().map(|&p| p + 1).collect()).collect()
        });
        SetPartitionTriple::new(self.degree(), blocks).expect("slices partition the points")
    }

    /// Relabels coordinates: `perms[k][c-1]` is the new k-th coordinate of old coordinate `c`.
    pub fn permute_coordinates(&self, perms: &[Vec<usize>; 3]) -> Result<Self> {
        for k in 0..3 {
            let mut seen = perms[k].clone();
            seen.sort_unstable();
            if perms[k].len() != self.bbox[k] || seen != (1..=self.bbox[k]).collect::<Vec<_>>() {
                return Err(Error::InvalidDesign(format!("perms[{k}] is not a permutation of 1..{}", self.bbox[k])));
            }
        }
        let pts = self.points.iter().map(|p| std::array::from_fn(|k| perms[k][p[k] - 1])).collect();
        Self::new(self.bbox, pts)
    }

    /// A random equivalent design: coordinates are shuffled among slices of equal size.
    pub fn random_equivalent<R: Rng>(&self, rng: &mut R) -> Self {
        let perms: [Vec<usize>; 3] = std::array::from_fn(|k| {
            let mut perm: Vec<usize> = (1..=self.bbox[k]).collect();
            let mut by_size: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            let mut size_of = vec![0usize; self.bbox[k] + 1];
            for s in &self.slices[k] {
                size_of[self.points[s[0]][k]] = s.len();
            }
            for c in 1..=self.bbox[k] {
                by_size.entry(size_of[c]).or_default().push(c);
            }
            for coords in by_size.values() {
                let mut shuffled = coords.clone();
                shuffled.shuffle(rng);
                for (from, to) in coords.iter().zip(shuffled) {
                    perm[from - 1] = to;
                }
            }
            perm
        });
        self.permute_coordinates(&perms).expect("valid permutation")
    }

    pub fn to_json(&self) -> DesignJson {
        DesignJson { bbox: self.bbox, points: self.points.clone() }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let dj: DesignJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(dj.bbox, dj.points)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignJson {
    #[serde(rename = "box")]
    pub bbox: [usize; 3],
    pub points: Vec<Point>,
}

/// Ground set `{1..d}` with three set partitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetPartitionTriple {
    d: usize,
    blocks: [Vec<Vec<usize>>; 3],
}

impl SetPartitionTriple {
    pub fn new(d: usize, blocks: [Vec<Vec<usize>>; 3]) -> Result<Self> {
        for (k, part) in blocks.iter().enumerate() {
            let mut seen = vec![false; d + 1];
            for block in part {
                if block.is_empty() {
                    return Err(Error::InvalidDesign(format!("partition {} has an empty block", k + 1)));
                }
                for &e in block {
                    if e == 0 || e > d || seen[e] {
                        return Err(Error::InvalidDesign(format!(
                            "partition {} is not a set partition of 1..{d}",
                            k + 1
                        )));
                    }
                    seen[e] = true;
                }
            }
            if seen[1..].iter().any(|s| !s) {
                return Err(Error::InvalidDesign(format!("partition {} does not cover 1..{d}", k + 1)));
            }
        }
        let blocks = blocks.map(|part| {
            let mut part: Vec<Vec<usize>> = part
                .into_iter()
                .map(|mut b| {
                    b.sort_unstable();
                    b
                })
                .collect();
            // size descending, then by minimum element
            part.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
            part
        });
        Ok(SetPartitionTriple { d, blocks })
    }

    /// `Λ_λ = {{1..μ1}, {μ1+1..μ1+μ2}, ...}` with `μ = λ^t`.
    pub fn lambda_blocks(lambda: &Partition) -> Vec<Vec<usize>> {
        let mut next = 1;
        lambda
            .transpose()
            .parts()
            .iter()
            .map(|&len| {
                let b = (next..next + len).collect();
                next += len;
                b
            })
            .collect()
    }

    pub fn singletons(d: usize) -> Vec<Vec<usize>> {
        (1..=d).map(|e| vec![e]).collect()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Blocks of partition `k`, sorted by size descending then minimum element.
    pub fn blocks(&self, k: usize) -> &[Vec<usize>] {
        &self.blocks[k]
    }

    /// `block_of()[k][e]` is the 0-based block index of element `e` (1-based) in partition `k`.
    pub fn block_of(&self) -> [Vec<usize>; 3] {
        std::array::from_fn(|k| {
            let mut b = vec![usize::MAX; self.d + 1];
            for (i, block) in self.blocks[k].iter().enumerate() {
                for &e in block {
                    b[e] = i;
                }
            }
            b
        })
    }

    /// First block triple sharing two or more elements, if any.
    pub fn intersection_violation(&self) -> Option<([usize; 3], Vec<usize>)> {
        let bo = self.block_of();
        let mut groups: BTreeMap<[usize; 3], Vec<usize>> = BTreeMap::new();
        for e in 1..=self.d {
            groups.entry([bo[0][e] + 1, bo[1][e] + 1, bo[2][e] + 1]).or_default().push(e);
        }
        groups.into_iter().find(|(_, es)| es.len() >= 2)
    }

    pub fn has_intersection_property(&self) -> bool {
        self.intersection_violation().is_none()
    }

    /// Element `e` becomes the point `(b1(e), b2(e), b3(e))` of block numbers.
    pub fn to_design(&self) -> Result<ObstructionDesign> {
        if let Some((blocks, elements)) = self.intersection_violation() {
            return Err(Error::IntersectionViolation { blocks, elements });
        }
        let bo = self.block_of();
        let points = (1..=self.d).map(|e| [bo[0][e] + 1, bo[1][e] + 1, bo[2][e] + 1]).collect();
        ObstructionDesign::new(std::array::from_fn(|k| self.blocks[k].len()), points)
    }

    /// Every set partition of `{1..d}` (restricted growth strings).
    pub fn all_set_partitions(d: usize) -> Vec<Vec<Vec<usize>>> {
        fn rec(e: usize, d: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
            if e > d {
                out.push(cur.clone());
                return;
            }
            for i in 0..cur.len() {
                cur[i].push(e);
                rec(e + 1, d, cur, out);
                cur[i].pop();
            }
            cur.push(vec![e]);
            rec(e + 1, d, cur, out);
            cur.pop();
        }
        let mut out = Vec::new();
        rec(1, d, &mut Vec::new(), &mut out);
        out
    }
}

pub fn from_set_partitions(s: &SetPartitionTriple) -> Result<ObstructionDesign> {
    s.to_design()
}

// ---- canonical forms ----

/// Orbit data of a design under admissible slice permutations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub design: ObstructionDesign,
    /// Number of admissible relabelings fixing the design.
    pub automorphisms: BigUint,
    /// Order of the group of admissible relabelings.
    pub group_order: BigUint,
}

impl CanonicalForm {
    pub fn orbit_size(&self) -> BigUint {
        &self.group_order / &self.automorphisms
    }
}

struct Canon<'a> {
    h: &'a ObstructionDesign,
    /// class id of each slice
    class_of: [Vec<usize>; 3],
    nodes: u64,
    budget: u64,
    best: Option<Vec<Point>>,
    aut: u64,
}

impl Canon<'_> {
    fn dfs(
        &mut self,
        used: &mut Vec<bool>,
        labels: &mut [Vec<usize>; 3],
        next: &mut [Vec<usize>; 3],
        seq: &mut Vec<Point>,
        less: bool,
    ) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::LimitExceeded { budget: self.budget });
        }
        let d = self.h.degree();
        if seq.len() == d {
            if less || self.best.is_none() {
                self.best = Some(seq.clone());
                self.aut = 1;
            } else {
                self.aut += 1;
            }
            return Ok(());
        }
        let best_of = |p: usize, labels: &[Vec<usize>; 3], next: &[Vec<usize>; 3]| -> Point {
            std::array::from_fn(|k| {
                let s = self.h.slice_of[p][k];
                match labels[k][s] {
                    0 => next[k][self.class_of[k][s]],
                    l => l,
                }
            })
        };
        let mut v: Option<Point> = None;
        let mut cands = Vec::new();
        for p in (0..d).filter(|&p| !used[p]) {
            let b = best_of(p, labels, next);
            match v {
                Some(cur) if b > cur => {}
                Some(cur) if b == cur => cands.push(p),
                _ => {
                    v = Some(b);
                    cands.clear();
                    cands.push(p);
                }
            }
        }
        let v = v.expect("a remaining point");
        let mut less = less;
        if !less {
            if let Some(best) = &self.best {
                let t = best[seq.len()];
                if v > t {
                    return Ok(());
                }
                less = v < t;
            }
        }
        for p in cands {
            let mut assigned = [false; 3];
            for k in 0..3 {
                let s = self.h.slice_of[p][k];
                if labels[k][s] == 0 {
                    labels[k][s] = v[k];
                    next[k][self.class_of[k][s]] += 1;
                    assigned[k] = true;
                }
            }
            used[p] = true;
            seq.push(v);
            self.dfs(used, labels, next, seq, less)?;
            seq.pop();
            used[p] = false;
            for k in 0..3 {
                if assigned[k] {
                    let s = self.h.slice_of[p][k];
                    labels[k][s] = 0;
                    next[k][self.class_of[k][s]] -= 1;
                }
            }
            // once a strictly smaller prefix has become the best, siblings compare against it
            if less {
                less = false;
                if let Some(best) = &self.best {
                    if v > best[seq.len()] {
                        return Ok(());
                    }
                    less = v < best[seq.len()];
                }
            }
        }
        Ok(())
    }
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// Lexicographically least sorted point list over all relabelings that
/// map each size class of k-slices onto a block of consecutive labels,
/// larger slices first.
pub fn canonical_form_with_budget(h: &ObstructionDesign, budget: u64) -> Result<CanonicalForm> {
    let mut class_start: [Vec<usize>; 3] = Default::default();
    let mut class_of: [Vec<usize>; 3] = Default::default();
    let mut group_order = BigUint::one();
    let mut bbox = [0; 3];
    for k in 0..3 {
        let sizes = h.marginal(k);
        let mut distinct: Vec<usize> = sizes.clone();
        distinct.sort_unstable_by(|a, b| b.cmp(a));
        distinct.dedup();
        let mut start = 1;
        for &s in &distinct {
            let count = sizes.iter().filter(|&&x| x == s).count();
            class_start[k].push(start);
            start += count;
            group_order *= factorial(count);
        }
        class_of[k] = sizes.iter().map(|s| distinct.iter().position(|x| x == s).unwrap()).collect();
        bbox[k] = sizes.len();
    }
    let mut c = Canon { h, class_of, nodes: 0, budget, best: None, aut: 0 };
    let mut labels: [Vec<usize>; 3] = std::array::from_fn(|k| vec![0; h.slices[k].len()]);
    let mut next = class_start;
    c.dfs(&mut vec![false; h.degree()], &mut labels, &mut next, &mut Vec::new(), false)?;
    let pts = c.best.unwrap_or_default();
    Ok(CanonicalForm {
        design: ObstructionDesign::new(bbox, pts)?,
        automorphisms: BigUint::from(c.aut.max(1)),
        group_order,
    })
}

pub fn canonical_form(h: &ObstructionDesign) -> Result<CanonicalForm> {
    canonical_form_with_budget(h, DEFAULT_NODE_BUDGET)
}

pub fn equivalent(a: &ObstructionDesign, b: &ObstructionDesign) -> Result<bool> {
    Ok(canonical_form(a)?.design == canonical_form(b)?.design)
}

// ---- enumeration ----

#[derive(Clone, Copy, Debug)]
pub struct SearchLimits {
    pub node_budget: u64,
    pub max_degree: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { node_budget: DEFAULT_NODE_BUDGET, max_degree: DEFAULT_MAX_DEGREE }
    }
}

struct Search<'a> {
    mu: [Vec<usize>; 3],
    /// first slice index of each slice's size class (directions 2 and 3)
    class_first: [Vec<usize>; 3],
    symmetry_break: bool,
    nodes: &'a AtomicU64,
    budget: u64,
}

impl Search<'_> {
    fn tick(&self) -> Result<()> {
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            return Err(Error::LimitExceeded { budget: self.budget });
        }
        Ok(())
    }

    /// Whether slice `s` in direction `k` may receive a point given the current counts.
    fn may_use(&self, k: usize, s: usize, counts: &[usize]) -> bool {
        if counts[s] >= self.mu[k][s] {
            return false;
        }
        if self.symmetry_break && counts[s] == 0 {
            let first = self.class_first[k][s];
            if (first..s).any(|t| counts[t] == 0) {
                return false;
            }
        }
        true
    }

    /// Fills row `i` (0-based) and onward; `cur` holds the points chosen so far.
    fn rows(
        &self,
        i: usize,
        c2: &mut Vec<usize>,
        c3: &mut Vec<usize>,
        cur: &mut Vec<Point>,
        out: &mut dyn FnMut(&[Point]) -> Result<()>,
    ) -> Result<()> {
        self.tick()?;
        if i == self.mu[0].len() {
            return out(cur);
        }
        self.row_cells(i, self.mu[0][i], 0, c2, c3, cur, out)
    }

    #[allow(clippy::too_many_arguments)]
    fn row_cells(
        &self,
        i: usize,
        left: usize,
        from: usize,
        c2: &mut Vec<usize>,
        c3: &mut Vec<usize>,
        cur: &mut Vec<Point>,
        out: &mut dyn FnMut(&[Point]) -> Result<()>,
    ) -> Result<()> {
        if left == 0 {
            return self.rows(i + 1, c2, c3, cur, out);
        }
        let l2 = self.mu[1].len();
        let l3 = self.mu[2].len();
        let cells = l2 * l3;
        if cells - from < left {
            return Ok(());
        }
        for cell in from..=cells - left {
            let (j, k) = (cell / l3, cell % l3);
            if !self.may_use(1, j, c2) || !self.may_use(2, k, c3) {
                continue;
            }
            self.tick()?;
            c2[j] += 1;
            c3[k] += 1;
            cur.push([i + 1, j + 1, k + 1]);
            let r = self.row_cells(i, left - 1, cell + 1, c2, c3, cur, out);
            cur.pop();
            c2[j] -= 1;
            c3[k] -= 1;
            r?;
        }
        Ok(())
    }
}

/// Slice sizes `μ^(k) = (λ^(k))^t` for a type, each sorted nonincreasing.
pub fn marginals_of_type(lambda: &PartitionTriple) -> [Vec<usize>; 3] {
    std::array::from_fn(|k| lambda.components[k].transpose().parts().to_vec())
}

fn check_type(lambda: &PartitionTriple, limits: &SearchLimits) -> Result<usize> {
    let d = lambda
        .common_size()
        .ok_or_else(|| Error::InvalidPartition(format!("components of {lambda} differ in size")))?;
    if d > limits.max_degree {
        return Err(Error::ScaleExceeded(format!("d = {d} exceeds the limit {}", limits.max_degree)));
    }
    Ok(d)
}

/// Runs the search from every admissible first row in parallel, collecting designs.
fn search_all(lambda: &PartitionTriple, symmetry_break: bool, limits: &SearchLimits) -> Result<Vec<ObstructionDesign>> {
    check_type(lambda, limits)?;
    let mu = marginals_of_type(lambda);
    let class_first = std::array::from_fn(|k| {
        (0..mu[k].len()).map(|s| (0..=s).find(|&t| mu[k][t] == mu[k][s]).unwrap()).collect()
    });
    let bbox = std::array::from_fn(|k| mu[k].len());
    let nodes = AtomicU64::new(0);
    let search = Search { mu: mu.clone(), class_first, symmetry_break, nodes: &nodes, budget: limits.node_budget };
    // shard on the first point of row 1
    let l3 = mu[2].len();
    let first_cells: Vec<Option<usize>> =
        if mu[0].is_empty() { vec![None] } else { (0..mu[1].len() * l3).map(Some).collect() };
    let results: Vec<Result<Vec<Vec<Point>>>> = first_cells
        .par_iter()
        .map(|&cell| {
            let mut c2 = vec![0; mu[1].len()];
            let mut c3 = vec![0; mu[2].len()];
            let mut found = Vec::new();
            let mut cur = Vec::new();
            let mut sink = |pts: &[Point]| {
                found.push(pts.to_vec());
                Ok(())
            };
            match cell {
                None => search.rows(0, &mut c2, &mut c3, &mut cur, &mut sink)?,
                Some(cell) => {
                    let (j, k) = (cell / l3, cell % l3);
                    if search.may_use(1, j, &c2) && search.may_use(2, k, &c3) {
                        c2[j] += 1;
                        c3[k] += 1;
                        cur.push([1, j + 1, k + 1]);
                        search.row_cells(0, mu[0][0] - 1, cell + 1, &mut c2, &mut c3, &mut cur, &mut sink)?;
                    }
                }
            }
            Ok(found)
        })
        .collect();
    if nodes.load(Ordering::Relaxed) > limits.node_budget {
        return Err(Error::LimitExceeded { budget: limits.node_budget });
    }
    let mut out = Vec::new();
    for r in results {
        for pts in r? {
            out.push(ObstructionDesign::new(bbox, pts)?);
        }
    }
    out.sort();
    Ok(out)
}

/// All designs of type `λ` whose k-slices sit at coordinates `1..ℓ_k` with
/// nonincreasing sizes. With `up_to_equivalence`, one canonical
/// representative per class, in sorted order.
pub fn enumerate_designs(
    lambda: &PartitionTriple,
    up_to_equivalence: bool,
    limits: &SearchLimits,
) -> Result<Vec<ObstructionDesign>> {
    if !up_to_equivalence {
        return search_all(lambda, false, limits);
    }
    let reps = search_all(lambda, true, limits)?;
    let canon: Vec<Result<ObstructionDesign>> = reps
        .par_iter()
        .map(|h| canonical_form_with_budget(h, limits.node_budget).map(|c| c.design))
        .collect();
    let mut set = BTreeSet::new();
    for c in canon {
        set.insert(c?);
    }
    Ok(set.into_iter().collect())
}

/// `N(λ)`: the number of equivalence classes of designs of type `λ`.
pub fn count_classes(lambda: &PartitionTriple, limits: &SearchLimits) -> Result<usize> {
    Ok(enumerate_designs(lambda, true, limits)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t(s: &str) -> PartitionTriple {
        s.parse().unwrap()
    }

    fn hook(kappa: usize) -> ObstructionDesign {
        let mut pts = vec![[1, 1, 1]];
        for i in 2..=kappa + 1 {
            pts.extend([[i, 1, 1], [1, i, 1], [1, 1, i]]);
        }
        ObstructionDesign::from_points(pts).unwrap()
    }

    fn cube(n: usize) -> ObstructionDesign {
        let mut pts = Vec::new();
        for i in 1..=n {
            for j in 1..=n {
                for k in 1..=n {
                    pts.push([i, j, k]);
                }
            }
        }
        ObstructionDesign::from_points(pts).unwrap()
    }

    #[test]
    fn types_of_small_designs() {
        assert_eq!(hook(2).design_type(), t("3,1,1,1,1|3,1,1,1,1|3,1,1,1,1"));
        assert_eq!(cube(2).design_type(), t("2,2,2,2|2,2,2,2|2,2,2,2"));
        let single = ObstructionDesign::from_points(vec![[1, 1, 1]]).unwrap();
        assert_eq!(single.design_type(), t("1|1|1"));
        let h = hook(3);
        for k in 0..3 {
            assert_eq!(h.marginal(k).iter().sum::<usize>(), h.degree());
        }
    }

    #[test]
    fn rejects_bad_points() {
        assert!(ObstructionDesign::new([2, 2, 2], vec![[1, 1, 3]]).is_err());
        assert!(ObstructionDesign::new([2, 2, 2], vec![[1, 1, 1], [1, 1, 1]]).is_err());
        assert!(ObstructionDesign::from_json_str(r#"{"box":[1,1,1],"points":[[1,1,1]]}"#).is_ok());
    }

    #[test]
    fn empty_slices_are_dropped() {
        let h = ObstructionDesign::new([5, 5, 5], vec![[1, 3, 5], [4, 3, 2]]).unwrap();
        assert_eq!(h.marginal(0), vec![1, 1]);
        assert_eq!(h.marginal(1), vec![2]);
        assert_eq!(h.design_type(), t("2|1,1|2"));
    }

    #[test]
    fn set_partition_examples() {
        let s = SetPartitionTriple::new(
            1,
            [SetPartitionTriple::singletons(1), SetPartitionTriple::singletons(1), SetPartitionTriple::singletons(1)],
        )
        .unwrap();
        assert_eq!(s.to_design().unwrap().points(), &[[1, 1, 1]]);

        let s = SetPartitionTriple::new(2, [vec![vec![1, 2]], vec![vec![1, 2]], vec![vec![1, 2]]]).unwrap();
        assert_eq!(
            s.to_design(),
            Err(Error::IntersectionViolation { blocks: [1, 1, 1], elements: vec![1, 2] })
        );

        let lam = Partition::new(vec![2, 1]).unwrap();
        let s = SetPartitionTriple::new(
            3,
            [SetPartitionTriple::lambda_blocks(&lam), SetPartitionTriple::singletons(3), SetPartitionTriple::singletons(3)],
        )
        .unwrap();
        let h = s.to_design().unwrap();
        assert_eq!(h.points(), &[[1, 1, 1], [1, 2, 2], [2, 3, 3]]);
        assert_eq!(h.sorted_marginal(0).transpose(), lam);

        assert!(SetPartitionTriple::new(2, [vec![vec![1]], vec![vec![1, 2]], vec![vec![1, 2]]]).is_err());
        // Bell numbers
        let counts: Vec<usize> = (0..=5).map(|d| SetPartitionTriple::all_set_partitions(d).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52]);
    }

    #[test]
    fn known_class_counts() {
        let lim = SearchLimits::default();
        assert_eq!(count_classes(&t("2,2,2,2|2,2,2,2|2,2,2,2"), &lim).unwrap(), 1);
        assert_eq!(count_classes(&t("3,1,1,1,1|3,1,1,1,1|3,1,1,1,1"), &lim).unwrap(), 1);
        assert_eq!(count_classes(&t("1|1|1"), &lim).unwrap(), 1);
        // two singleton slices in directions 1 and 2, one slice of size 2 in direction 3
        let two = enumerate_designs(&t("2|2|1,1"), true, &lim).unwrap();
        assert_eq!(two.len(), 1);
        assert_eq!(two[0].points(), &[[1, 1, 1], [2, 2, 1]]);
        // marginals that no point set can realize
        assert!(enumerate_designs(&t("1,1|1,1|1,1"), false, &lim).unwrap().is_empty());
        let reps = enumerate_designs(&t("3,1,1,1,1|3,1,1,1,1|3,1,1,1,1"), true, &lim).unwrap();
        assert_eq!(reps[0], canonical_form(&hook(2)).unwrap().design);
        assert!(count_classes(&t("2|1,1|1"), &lim).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let lim = SearchLimits { node_budget: 3, max_degree: 16 };
        assert_eq!(
            enumerate_designs(&t("2,2,2,2|2,2,2,2|2,2,2,2"), false, &lim),
            Err(Error::LimitExceeded { budget: 3 })
        );
        let lim = SearchLimits { node_budget: 100, max_degree: 3 };
        assert!(matches!(count_classes(&t("4|4|4"), &lim), Err(Error::ScaleExceeded(_))));
    }

    fn corpus(dmax: usize) -> Vec<PartitionTriple> {
        (1..=dmax).flat_map(|d| PartitionTriple::all(d, 3)).collect()
    }

    #[test]
    fn orbit_sizes_sum_to_labelled_count() {
        let lim = SearchLimits::default();
        for lam in corpus(5) {
            let all = enumerate_designs(&lam, false, &lim).unwrap();
            let reps = enumerate_designs(&lam, true, &lim).unwrap();
            let total: BigUint = reps.iter().map(|h| canonical_form(h).unwrap().orbit_size()).sum();
            assert_eq!(total, BigUint::from(all.len()), "{lam}");
            // dedupe of the unrestricted search agrees with the symmetry-broken one
            let brute: BTreeSet<_> = all.iter().map(|h| canonical_form(h).unwrap().design).collect();
            assert_eq!(brute.into_iter().collect::<Vec<_>>(), reps, "{lam}");
            for (i, a) in reps.iter().enumerate() {
                assert_eq!(&a.design_type(), &lam);
                for b in &reps[i + 1..] {
                    assert!(!equivalent(a, b).unwrap());
                }
            }
        }
    }

    #[test]
    fn round_trip_through_set_partitions() {
        let lim = SearchLimits::default();
        for lam in corpus(6).into_iter().filter(|l| l.components[0].size() <= 8) {
            for h in enumerate_designs(&lam, true, &lim).unwrap() {
                let back = from_set_partitions(&h.to_set_partitions()).unwrap();
                assert!(equivalent(&h, &back).unwrap());
                assert_eq!(back.design_type(), lam);
            }
        }
        let c = cube(2);
        assert!(equivalent(&c, &from_set_partitions(&c.to_set_partitions()).unwrap()).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let h = hook(2);
        let back = ObstructionDesign::from_json_str(&h.to_json_string()).unwrap();
        assert_eq!(back, h);
        assert!(h.to_json_string().contains("\"box\""));
    }

    #[test]
    fn hook_automorphisms() {
        for kappa in 1..=3 {
            let c = canonical_form(&hook(kappa)).unwrap();
            let f = factorial(kappa);
            assert_eq!(c.automorphisms, &f * &f * &f);
            assert_eq!(c.orbit_size(), BigUint::one());
        }
    }

    fn arb_design() -> impl Strategy<Value = ObstructionDesign> {
        prop::collection::btree_set((1usize..=4, 1usize..=4, 1usize..=4), 1..=10).prop_map(|s| {
            ObstructionDesign::from_points(s.into_iter().map(|(a, b, c)| [a, b, c]).collect()).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]
        #[test]
        fn equivalent_designs_share_canonical_form(h in arb_design(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = h.random_equivalent(&mut rng);
            prop_assert_eq!(canonical_form(&g).unwrap().design, canonical_form(&h).unwrap().design);
            prop_assert_eq!(g.design_type(), h.design_type());
        }

        #[test]
        fn marginals_sum_to_degree(h in arb_design()) {
            for k in 0..3 {
                prop_assert_eq!(h.marginal(k).iter().sum::<usize>(), h.degree());
            }
            let c = canonical_form(&h).unwrap().design;
            prop_assert_eq!(c.design_type(), h.design_type());
        }
    }
}
