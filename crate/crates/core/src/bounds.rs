//! Chromatic index of obstruction designs and border-rank lower-bound
//! certificates.
//!
//! `χ′(H)` is the chromatic number of the conflict graph on the points of
//! `H` (two points are adjacent when they share a slice). If `f_H(w) ≠ 0`
//! then `R̲(w) ≥ χ′(H)`.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{parse_rational, QMatrix, Rational};
use crate::designs::{DesignJson, ObstructionDesign};
use crate::error::{Error, Result};
use crate::hwv::{eval_fh, DEFAULT_EVAL_BUDGET};
use crate::matmul;
use crate::tensors::{act, random_invertible, GroupElementTriple, Rank1Decomposition, TensorJson};

pub const DEFAULT_MAX_POINTS: usize = 40;
pub const DEFAULT_COLORING_BUDGET: u64 = 10_000_000;

/// Color (0-based) of every point, in point order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub colors: Vec<usize>,
}

impl Coloring {
    pub fn num_colors(&self) -> usize {
        self.colors.iter().max().map_or(0, |c| c + 1)
    }

    /// Proper iff the colors within every slice are pairwise distinct.
    pub fn is_proper(&self, h: &ObstructionDesign) -> bool {
        self.colors.len() == h.degree()
            && (0..3).all(|k| {
                h.slices(k).iter().all(|s| {
                    let mut cs: Vec<usize> = s.iter().map(|&p| self.colors[p]).collect();
                    cs.sort_unstable();
                    cs.windows(2).all(|w| w[0] != w[1])
                })
            })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ChromaticLimits {
    /// Largest design for which a branch-and-bound search is attempted.
    pub max_points: usize,
    pub node_budget: u64,
}

impl Default for ChromaticLimits {
    fn default() -> Self {
        ChromaticLimits { max_points: DEFAULT_MAX_POINTS, node_budget: DEFAULT_COLORING_BUDGET }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChromaticResult {
    pub index: usize,
    pub coloring: Coloring,
    /// Pairwise conflicting points; a lower bound on the index.
    pub clique: Vec<usize>,
}

fn adjacency(h: &ObstructionDesign) -> Vec<Vec<bool>> {
    let d = h.degree();
    (0..d).map(|p| (0..d).map(|q| h.conflict(p, q)).collect()).collect()
}

/// Greedy coloring in order of decreasing conflict degree, ties by point order.
pub fn greedy_coloring(h: &ObstructionDesign) -> Coloring {
    let d = h.degree();
    let adj = adjacency(h);
    let deg: Vec<usize> = (0..d).map(|p| adj[p].iter().filter(|&&a| a).count()).collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| deg[b].cmp(&deg[a]).then(a.cmp(&b)));
    let mut colors = vec![usize::MAX; d];
    for &p in &order {
        let mut used = vec![false; d + 1];
        for q in 0..d {
            if adj[p][q] && colors[q] != usize::MAX {
                used[colors[q]] = true;
            }
        }
        colors[p] = used.iter().position(|u| !u).unwrap();
    }
    Coloring { colors }
}

pub fn chromatic_index_greedy(h: &ObstructionDesign) -> usize {
    greedy_coloring(h).num_colors()
}

/// Greedy clique: every start vertex, extended by highest remaining degree.
fn greedy_clique(adj: &[Vec<bool>]) -> Vec<usize> {
    let d = adj.len();
    let deg: Vec<usize> = (0..d).map(|p| adj[p].iter().filter(|&&a| a).count()).collect();
    let mut best = Vec::new();
    for start in 0..d {
        let mut clique = vec![start];
        let mut cand: Vec<usize> = (0..d).filter(|&q| adj[start][q]).collect();
        while !cand.is_empty() {
            let &v = cand.iter().max_by(|&&a, &&b| deg[a].cmp(&deg[b]).then(b.cmp(&a))).unwrap();
            clique.push(v);
            cand.retain(|&q| q != v && adj[v][q]);
        }
        if clique.len() > best.len() {
            clique.sort_unstable();
            best = clique;
        }
    }
    best
}

struct Dsatur<'a> {
    adj: &'a [Vec<bool>],
    best: usize,
    best_colors: Vec<usize>,
    lower: usize,
    nodes: u64,
    budget: u64,
}

impl Dsatur<'_> {
    fn search(&mut self, colors: &mut Vec<usize>, used_colors: usize, colored: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::LimitExceeded { budget: self.budget });
        }
        let d = self.adj.len();
        if colored == d {
            if used_colors < self.best {
                self.best = used_colors;
                self.best_colors = colors.clone();
            }
            return Ok(());
        }
        // uncolored vertex of maximum saturation, then degree, then index
        let mut pick = None;
        let mut key = (0usize, 0usize);
        for v in (0..d).filter(|&v| colors[v] == usize::MAX) {
            let mut seen = vec![false; used_colors];
            let mut uncolored_deg = 0;
            for q in 0..d {
                if self.adj[v][q] {
                    if colors[q] == usize::MAX {
                        uncolored_deg += 1;
                    } else {
                        seen[colors[q]] = true;
                    }
                }
            }
            let sat = seen.iter().filter(|&&s| s).count();
            if pick.is_none() || (sat, uncolored_deg) > key {
                pick = Some(v);
                key = (sat, uncolored_deg);
            }
        }
        let v = pick.expect("uncolored vertex");
        for c in 0..=used_colors {
            let next_used = used_colors.max(c + 1);
            if next_used >= self.best {
                break;
            }
            if (0..d).any(|q| self.adj[v][q] && colors[q] == c) {
                continue;
            }
            colors[v] = c;
            self.search(colors, next_used, colored + 1)?;
            colors[v] = usize::MAX;
            if self.best <= self.lower {
                return Ok(());
            }
        }
        Ok(())
    }
}

/// Exact `χ′(H)` with an optimal coloring and a clique lower bound.
///
/// When the clique already matches the greedy coloring no search runs, so
/// large designs with a certifying clique are accepted beyond `max_points`.
pub fn chromatic_index_exact_with(h: &ObstructionDesign, limits: &ChromaticLimits) -> Result<ChromaticResult> {
    let adj = adjacency(h);
    let clique = greedy_clique(&adj);
    let greedy = greedy_coloring(h);
    if greedy.num_colors() == clique.len() {
        return Ok(ChromaticResult { index: clique.len(), coloring: greedy, clique });
    }
    if h.degree() > limits.max_points {
        return Err(Error::ScaleExceeded(format!(
            "{} points exceed the coloring search limit {}",
            h.degree(),
            limits.max_points
        )));
    }
    let mut s = Dsatur {
        adj: &adj,
        best: greedy.num_colors(),
        best_colors: greedy.colors.clone(),
        lower: clique.len(),
        nodes: 0,
        budget: limits.node_budget,
    };
    let mut colors = vec![usize::MAX; h.degree()];
    // the clique can be precolored without loss of generality
    for (c, &v) in clique.iter().enumerate() {
        colors[v] = c;
    }
    s.search(&mut colors, clique.len(), clique.len())?;
    Ok(ChromaticResult { index: s.best, coloring: Coloring { colors: s.best_colors }, clique })
}

pub fn chromatic_index_exact(h: &ObstructionDesign) -> Result<(usize, Coloring)> {
    let r = chromatic_index_exact_with(h, &ChromaticLimits::default())?;
    Ok((r.index, r.coloring))
}

// ---- certificates ----

mod decimal {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &usize, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `(g1, g2, g3)` as rows of decimal rationals.
pub type GroupElementJson = [Vec<Vec<String>>; 3];

fn group_to_json(g: &GroupElementTriple) -> GroupElementJson {
    std::array::from_fn(|k| {
        g.matrices()[k].to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
    })
}

fn group_from_json(g: &GroupElementJson) -> Result<GroupElementTriple> {
    let mats = g
        .iter()
        .map(|rows| {
            let rows = rows
                .iter()
                .map(|r| r.iter().map(|x| parse_rational(x)).collect::<Result<Vec<Rational>>>())
                .collect::<Result<Vec<_>>>()?;
            QMatrix::from_rows(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    let [a, b, c]: [QMatrix; 3] = mats.try_into().map_err(|_| Error::Parse("three matrices expected".into()))?;
    GroupElementTriple::new([a, b, c])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidSetCoefficient {
    /// The set `S ⊆ O_m` of matrix positions `(i, j)`.
    pub set: Vec<[usize; 2]>,
    pub coefficient: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum Witness {
    /// `f_H(g·w) = value ≠ 0`.
    Direct {
        target: TensorJson,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        group_element: Option<GroupElementJson>,
        value: String,
    },
    /// Coefficient of the monomial `X` in `f_{H_κ}(A·M_m)`.
    Symbolic {
        m: usize,
        target: TensorJson,
        monomial: Vec<u32>,
        per_valid_set: Vec<ValidSetCoefficient>,
        symmetry_factor: String,
        total: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub design: DesignJson,
    #[serde(with = "decimal")]
    pub chromatic_index: usize,
    pub optimal_coloring: Vec<usize>,
    /// Pairwise conflicting points certifying optimality when its size
    /// equals the chromatic index.
    pub clique: Vec<usize>,
    pub witness: Witness,
    /// `R̲(target) ≥ implied_bound`.
    #[serde(with = "decimal")]
    pub implied_bound: usize,
}

impl BoundCertificate {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Exact evaluation at `w`, then at seeded random `g·w`.
    Direct,
    /// Symbolic coefficient extraction for the hook design against `M_m`.
    Symbolic,
}

#[derive(Clone, Copy, Debug)]
pub struct CertifyOptions {
    pub strategy: Strategy,
    pub seed: u64,
    /// random group elements tried after the identity
    pub attempts: usize,
    pub eval_budget: u64,
    pub chromatic: ChromaticLimits,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            strategy: Strategy::Direct,
            seed: 0,
            attempts: 8,
            eval_budget: DEFAULT_EVAL_BUDGET,
            chromatic: ChromaticLimits::default(),
        }
    }
}

/// Certificate for `R̲(target) ≥ χ′(H)`.
pub fn certify_lower_bound(
    h: &ObstructionDesign,
    target: &Rank1Decomposition,
    opts: &CertifyOptions,
) -> Result<BoundCertificate> {
    let chrom = chromatic_index_exact_with(h, &opts.chromatic)?;
    let witness = match opts.strategy {
        Strategy::Direct => direct_witness(h, target, opts)?,
        Strategy::Symbolic => {
            let m = matmul::recognize_hook_and_mamu(h, target)?;
            symbolic_witness(m)?
        }
    };
    Ok(BoundCertificate {
        design: h.to_json(),
        chromatic_index: chrom.index,
        optimal_coloring: chrom.coloring.colors,
        clique: chrom.clique,
        witness,
        implied_bound: chrom.index,
    })
}

fn direct_witness(h: &ObstructionDesign, target: &Rank1Decomposition, opts: &CertifyOptions) -> Result<Witness> {
    let tj = TensorJson::from_parts(&target.to_tensor(), Some(target));
    let v = eval_fh(h, target, opts.eval_budget)?.numeric().cloned().expect("numeric");
    if !v.is_zero() {
        return Ok(Witness::Direct { target: tj, group_element: None, value: v.to_string() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let dims = target.dims();
    for _ in 0..opts.attempts {
        let g = GroupElementTriple::new(std::array::from_fn(|k| random_invertible(&mut rng, dims[k], 2)))?;
        let v = eval_fh(h, &act(&g, target)?, opts.eval_budget)?.numeric().cloned().expect("numeric");
        if !v.is_zero() {
            return Ok(Witness::Direct { target: tj, group_element: Some(group_to_json(&g)), value: v.to_string() });
        }
    }
    Err(Error::WitnessVanished)
}

pub(crate) fn symbolic_witness(m: usize) -> Result<Witness> {
    let hc = matmul::hook_coefficient(m)?;
    let (t, dec) = crate::tensors::mamu_tensor(m);
    Ok(Witness::Symbolic {
        m,
        target: TensorJson::from_parts(&t, Some(&dec)),
        monomial: hc.monomial.clone(),
        per_valid_set: hc
            .per_set
            .iter()
            .map(|(s, c)| ValidSetCoefficient { set: s.clone(), coefficient: c.to_string() })
            .collect(),
        symmetry_factor: hc.symmetry_factor.to_string(),
        total: hc.total.to_string(),
    })
}

/// Re-verifies a certificate from its serialized data alone.
pub fn check_certificate(cert: &BoundCertificate, opts: &CertifyOptions) -> Result<()> {
    let reject = |msg: String| Err(Error::CertificateRejected(msg));
    let h = ObstructionDesign::new(cert.design.bbox, cert.design.points.clone())?;
    if cert.design.points != h.points() {
        return reject("design points are not in lexicographic order".into());
    }
    let coloring = Coloring { colors: cert.optimal_coloring.clone() };
    if !coloring.is_proper(&h) {
        return reject("coloring is not proper".into());
    }
    if coloring.num_colors() != cert.chromatic_index {
        return reject(format!("coloring uses {} colors, not {}", coloring.num_colors(), cert.chromatic_index));
    }
    let mut clique = cert.clique.clone();
    clique.sort_unstable();
    clique.dedup();
    if clique.len() != cert.clique.len() || clique.iter().any(|&p| p >= h.degree()) {
        return reject("clique has repeated or out-of-range points".into());
    }
    if clique.iter().enumerate().any(|(i, &p)| clique[i + 1..].iter().any(|&q| !h.conflict(p, q))) {
        return reject("clique contains two non-conflicting points".into());
    }
    if clique.len() != cert.chromatic_index {
        let exact = chromatic_index_exact_with(&h, &opts.chromatic)?;
        if exact.index != cert.chromatic_index {
            return reject(format!("chromatic index is {}, not {}", exact.index, cert.chromatic_index));
        }
    }
    if cert.implied_bound != cert.chromatic_index {
        return reject("implied bound differs from the chromatic index".into());
    }
    match &cert.witness {
        Witness::Direct { target, group_element, value } => {
            let (_, dec) = target.clone().into_parts()?;
            let dec = dec.ok_or_else(|| Error::CertificateRejected("target has no decomposition".into()))?;
            let arg = match group_element {
                Some(g) => act(&group_from_json(g)?, &dec)?,
                None => dec,
            };
            let v = eval_fh(&h, &arg, opts.eval_budget)?.numeric().cloned().expect("numeric");
            if v.is_zero() {
                return reject("witness evaluates to zero".into());
            }
            if v.to_string() != *value {
                return reject(format!("witness value is {v}, certificate says {value}"));
            }
        }
        Witness::Symbolic { m, target, .. } => {
            let (_, dec) = target.clone().into_parts()?;
            let dec = dec.ok_or_else(|| Error::CertificateRejected("target has no decomposition".into()))?;
            if matmul::recognize_hook_and_mamu(&h, &dec)? != *m {
                return reject("design and target do not match the recorded m".into());
            }
            let fresh = symbolic_witness(*m)?;
            if fresh != cert.witness {
                return reject("recomputed symbolic witness differs".into());
            }
            if let Witness::Symbolic { total, .. } = &fresh {
                if total.parse::<BigInt>().map_err(|e| Error::Parse(e.to_string()))?.is_zero() {
                    return reject("symbolic witness coefficient is zero".into());
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PartitionTriple;
    use crate::designs::{enumerate_designs, SearchLimits};
    use crate::tensors::{random_low_rank, unit_tensor};
    use proptest::prelude::{prop, proptest, prop_assert, ProptestConfig};
    use proptest::strategy::Strategy as _;

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

    /// Smallest `c` admitting a proper coloring, by trying all colorings.
    fn brute_chromatic(h: &ObstructionDesign) -> usize {
        let d = h.degree();
        for c in 1..=d {
            let mut colors = vec![0usize; d];
            loop {
                if (Coloring { colors: colors.clone() }).is_proper(h) {
                    return c;
                }
                let mut i = 0;
                while i < d {
                    colors[i] += 1;
                    if colors[i] < c {
                        break;
                    }
                    colors[i] = 0;
                    i += 1;
                }
                if i == d {
                    break;
                }
            }
        }
        d
    }

    #[test]
    fn chromatic_examples() {
        let single = ObstructionDesign::from_points(vec![[1, 1, 1]]).unwrap();
        assert_eq!(chromatic_index_exact(&single).unwrap().0, 1);
        assert_eq!(chromatic_index_greedy(&single), 1);
        let (c, col) = chromatic_index_exact(&hook(2)).unwrap();
        assert_eq!(c, 7);
        assert!(col.is_proper(&hook(2)));
        let g = chromatic_index_greedy(&hook(2));
        assert!((7..=13).contains(&g));
        let cube2 = cube(2);
        let (c, col) = chromatic_index_exact(&cube2).unwrap();
        assert_eq!(c, 4);
        assert_eq!(brute_chromatic(&cube2), 4);
        assert_eq!(col.num_colors(), 4);
        assert!((4..=10).contains(&chromatic_index_greedy(&cube2)));
    }

    #[test]
    fn hook_family() {
        for kappa in 1..=6 {
            let r = chromatic_index_exact_with(&hook(kappa), &ChromaticLimits::default()).unwrap();
            assert_eq!(r.index, 3 * kappa + 1);
            assert_eq!(r.clique.len(), 3 * kappa + 1);
        }
        // m = 7 hook has 73 points but is certified by its clique
        assert_eq!(chromatic_index_exact(&hook(24)).unwrap().0, 73);
    }

    #[test]
    fn exact_matches_brute_force_on_enumerated_designs() {
        let lim = SearchLimits::default();
        let mut seen = 0;
        for d in 1..=6 {
            for lam in PartitionTriple::all(d, 3) {
                for h in enumerate_designs(&lam, true, &lim).unwrap() {
                    let r = chromatic_index_exact_with(&h, &ChromaticLimits::default()).unwrap();
                    assert!(r.coloring.is_proper(&h));
                    assert_eq!(r.coloring.num_colors(), r.index);
                    if d <= 5 {
                        assert_eq!(r.index, brute_chromatic(&h), "{lam}");
                    }
                    let g = chromatic_index_greedy(&h);
                    assert!(g >= r.index && g <= 3 * h.max_slice_size() - 2);
                    seen += 1;
                }
            }
        }
        assert!(seen > 100);
    }

    #[test]
    fn search_limit_applies_only_when_searching() {
        // an odd cycle of conflicts: clique 2, chromatic 3
        let h = ObstructionDesign::from_points(vec![[1, 1, 1], [1, 2, 2], [2, 2, 3], [3, 3, 3], [3, 4, 1]]).unwrap();
        let r = chromatic_index_exact_with(&h, &ChromaticLimits::default()).unwrap();
        assert_eq!(r.index, brute_chromatic(&h));
        let tight = ChromaticLimits { max_points: 2, node_budget: 10 };
        if r.clique.len() < r.index {
            assert!(matches!(chromatic_index_exact_with(&h, &tight), Err(Error::ScaleExceeded(_))));
        }
    }

    #[test]
    fn certificates_round_trip() {
        let single = ObstructionDesign::from_points(vec![[1, 1, 1]]).unwrap();
        let (_, u1) = unit_tensor(1);
        let opts = CertifyOptions::default();
        let cert = certify_lower_bound(&single, &u1, &opts).unwrap();
        assert_eq!(cert.implied_bound, 1);
        let s = cert.to_json_string();
        assert!(s.contains("\"implied_bound\": \"1\""));
        let back = BoundCertificate::from_json_str(&s).unwrap();
        assert_eq!(back, cert);
        check_certificate(&back, &opts).unwrap();

        // the hook polynomial vanishes on ⟨7⟩ itself but not on its orbit
        let (_, u7) = unit_tensor(7);
        let cert = certify_lower_bound(&hook(2), &u7, &opts).unwrap();
        assert_eq!(cert.implied_bound, 7);
        assert!(matches!(cert.witness, Witness::Direct { group_element: Some(_), .. }));
        check_certificate(&BoundCertificate::from_json_str(&cert.to_json_string()).unwrap(), &opts).unwrap();

        let mut bad = cert.clone();
        bad.chromatic_index = 6;
        bad.implied_bound = 6;
        assert!(check_certificate(&bad, &opts).is_err());
        let mut bad = cert.clone();
        if let Witness::Direct { value, .. } = &mut bad.witness {
            value.push('0');
        }
        assert!(matches!(check_certificate(&bad, &opts), Err(Error::CertificateRejected(_))));
    }

    #[test]
    fn witness_vanishes_below_chromatic_index() {
        let (_, w) = random_low_rank([5, 5, 5], 6, 3, 21);
        let opts = CertifyOptions { attempts: 3, ..CertifyOptions::default() };
        assert_eq!(certify_lower_bound(&hook(2), &w, &opts), Err(Error::WitnessVanished));
    }

    fn arb_design() -> impl proptest::strategy::Strategy<Value = ObstructionDesign> {
        prop::collection::btree_set((1usize..=4, 1usize..=4, 1usize..=4), 1..=10).prop_map(|s| {
            ObstructionDesign::from_points(s.into_iter().map(|(a, b, c)| [a, b, c]).collect()).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn greedy_bounds(h in arb_design()) {
            let (exact, col) = chromatic_index_exact(&h).unwrap();
            prop_assert!(col.is_proper(&h));
            let g = chromatic_index_greedy(&h);
            prop_assert!(g >= exact);
            prop_assert!(g <= 3 * h.max_slice_size() - 2);
            prop_assert!(greedy_coloring(&h).is_proper(&h));
        }
    }
}
