//! Order-3 tensors over the rationals, rank-one decompositions, and the
//! action of `GL × GL × GL`.
//!
//! Indices are 1-based throughout, matching the JSON format. Matrix
//! index pairs `(i, j)` in `C^{m×m}` flatten to `(i-1)*m + j`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::linalg::is_nonzero_vector;
use crate::algebra::{parse_bigint, parse_rational, QMatrix, Rational};
use crate::error::{Error, Result};

/// Flattened index of the matrix unit `|ij⟩` in `C^{m²}` (1-based).
pub fn pair_index(m: usize, i: usize, j: usize) -> usize {
    (i - 1) * m + j
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseTensor3 {
    dims: [usize; 3],
    entries: BTreeMap<[usize; 3], Rational>,
}

impl SparseTensor3 {
    pub fn zeros(dims: [usize; 3]) -> Self {
        SparseTensor3 { dims, entries: BTreeMap::new() }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[usize; 3], &Rational)> {
        self.entries.iter()
    }

    pub fn get(&self, idx: [usize; 3]) -> Rational {
        self.entries.get(&idx).cloned().unwrap_or_else(Rational::zero)
    }

    fn check(&self, idx: [usize; 3]) -> Result<()> {
        for k in 0..3 {
            if idx[k] == 0 || idx[k] > self.dims[k] {
                return Err(Error::DimensionMismatch(format!(
                    "index {idx:?} outside dims {:?}",
                    self.dims
                )));
            }
        }
        Ok(())
    }

    /// Adds `value` to the entry at `idx`, dropping it if it becomes zero.
    pub fn add(&mut self, idx: [usize; 3], value: Rational) -> Result<()> {
        self.check(idx)?;
        if value.is_zero() {
            return Ok(());
        }
        let e = self.entries.entry(idx).or_insert_with(Rational::zero);
        *e += value;
        if e.is_zero() {
            self.entries.remove(&idx);
        }
        Ok(())
    }

    /// Zero-pads into a larger ambient space.
    pub fn embed(&self, dims: [usize; 3]) -> Result<Self> {
        if (0..3).any(|k| dims[k] < self.dims[k]) {
            return Err(Error::DimensionMismatch(format!(
                "cannot embed {:?} into {dims:?}",
                self.dims
            )));
        }
        Ok(SparseTensor3 { dims, entries: self.entries.clone() })
    }

    /// The `k`-th flattening (0-based direction) as a `dims[k] × (rest)` matrix.
    pub fn flattening(&self, k: usize) -> QMatrix {
        let (a, b) = match k {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let mut m = QMatrix::zeros(self.dims[k], self.dims[a] * self.dims[b]);
        for (idx, v) in &self.entries {
            let col = (idx[a] - 1) * self.dims[b] + (idx[b] - 1);
            m.set(idx[k] - 1, col, v.clone());
        }
        m
    }

    /// Uses the standard basis triples as a decomposition, one per nonzero entry.
    pub fn basis_decomposition(&self) -> Rank1Decomposition {
        let triples = self
            .entries
            .iter()
            .map(|(idx, v)| {
                let mut u = unit(self.dims[0], idx[0]);
                u[idx[0] - 1] = v.clone();
                [u, unit(self.dims[1], idx[1]), unit(self.dims[2], idx[2])]
            })
            .collect();
        Rank1Decomposition { dims: self.dims, triples }
    }
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i - 1] = Rational::one();
    v
}

pub type VectorTriple = [Vec<Rational>; 3];

/// `w = Σ_t u_t ⊗ v_t ⊗ x_t`; the triples form the label set of a labeling sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rank1Decomposition {
    dims: [usize; 3],
    triples: Vec<VectorTriple>,
}

impl Rank1Decomposition {
    pub fn new(dims: [usize; 3], triples: Vec<VectorTriple>) -> Result<Self> {
        for (t, tr) in triples.iter().enumerate() {
            for k in 0..3 {
                if tr[k].len() != dims[k] {
                    return Err(Error::DimensionMismatch(format!(
                        "triple {t} direction {} has length {}, expected {}",
                        k + 1,
                        tr[k].len(),
                        dims[k]
                    )));
                }
                if !is_nonzero_vector(&tr[k]) {
                    return Err(Error::DimensionMismatch(format!(
                        "triple {t} direction {} is the zero vector",
                        k + 1
                    )));
                }
            }
        }
        Ok(Rank1Decomposition { dims, triples })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn triples(&self) -> &[VectorTriple] {
        &self.triples
    }

    /// Number of terms, an upper bound on tensor rank.
    pub fn rank_bound(&self) -> usize {
        self.triples.len()
    }

    pub fn to_tensor(&self) -> SparseTensor3 {
        let mut out = SparseTensor3::zeros(self.dims);
        for [u, v, x] in &self.triples {
            for (i, a) in u.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
                for (j, b) in v.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                    let ab = a * b;
                    for (k, c) in x.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                        out.add([i + 1, j + 1, k + 1], &ab * c).expect("in range");
                    }
                }
            }
        }
        out
    }

    /// Zero-pads every vector to the given dims.
    pub fn embed(&self, dims: [usize; 3]) -> Result<Self> {
        if (0..3).any(|k| dims[k] < self.dims[k]) {
            return Err(Error::DimensionMismatch(format!(
                "cannot embed {:?} into {dims:?}",
                self.dims
            )));
        }
        let triples = self
            .triples
            .iter()
            .map(|tr| {
                std::array::from_fn(|k| {
                    let mut v = tr[k].clone();
                    v.resize(dims[k], Rational::zero());
                    v
                })
            })
            .collect();
        Ok(Rank1Decomposition { dims, triples })
    }
}

/// `(g1, g2, g3) ∈ GL_{n1} × GL_{n2} × GL_{n3}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElementTriple {
    mats: [QMatrix; 3],
}

impl GroupElementTriple {
    pub fn new(mats: [QMatrix; 3]) -> Result<Self> {
        for (k, g) in mats.iter().enumerate() {
            if g.det()?.is_zero() {
                return Err(Error::DimensionMismatch(format!("g{} is singular", k + 1)));
            }
        }
        Ok(GroupElementTriple { mats })
    }

    pub fn identity(dims: [usize; 3]) -> Self {
        GroupElementTriple { mats: dims.map(QMatrix::identity) }
    }

    pub fn matrices(&self) -> &[QMatrix; 3] {
        &self.mats
    }

    /// Componentwise product `(g1 h1, g2 h2, g3 h3)`.
    pub fn compose(&self, other: &GroupElementTriple) -> Result<Self> {
        Ok(GroupElementTriple {
            mats: [
                self.mats[0].mul(&other.mats[0])?,
                self.mats[1].mul(&other.mats[1])?,
                self.mats[2].mul(&other.mats[2])?,
            ],
        })
    }

    pub fn dets(&self) -> [Rational; 3] {
        std::array::from_fn(|k| self.mats[k].det().expect("square"))
    }
}

/// `g · w`: applies `g_k` to the k-th vector of every triple.
pub fn act(g: &GroupElementTriple, w: &Rank1Decomposition) -> Result<Rank1Decomposition> {
    for k in 0..3 {
        if g.mats[k].cols() != w.dims[k] {
            return Err(Error::DimensionMismatch(format!(
                "g{} has {} columns but direction {} has dimension {}",
                k + 1,
                g.mats[k].cols(),
                k + 1,
                w.dims[k]
            )));
        }
    }
    let dims = std::array::from_fn(|k| g.mats[k].rows());
    let triples = w
        .triples
        .iter()
        .map(|tr| -> Result<VectorTriple> {
            Ok([g.mats[0].mul_vec(&tr[0])?, g.mats[1].mul_vec(&tr[1])?, g.mats[2].mul_vec(&tr[2])?])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Rank1Decomposition { dims, triples })
}

/// The structure tensor `M_m = Σ |(i,j)(j,l)(l,i)⟩` in `⊗³ C^{m²}`,
/// decomposed into the `m³` triples `⟨ijl⟩`, listed in `(i, j, l)` order.
pub fn mamu_tensor(m: usize) -> (SparseTensor3, Rank1Decomposition) {
    let n = m * m;
    let mut triples = Vec::with_capacity(m * m * m);
    for i in 1..=m {
        for j in 1..=m {
            for l in 1..=m {
                triples.push([
                    unit(n, pair_index(m, i, j)),
                    unit(n, pair_index(m, j, l)),
                    unit(n, pair_index(m, l, i)),
                ]);
            }
        }
    }
    let dec = Rank1Decomposition { dims: [n; 3], triples };
    (dec.to_tensor(), dec)
}

/// Index of `⟨ijl⟩` in the decomposition returned by [`mamu_tensor`].
pub fn mamu_label(m: usize, i: usize, j: usize, l: usize) -> usize {
    ((i - 1) * m + (j - 1)) * m + (l - 1)
}

/// `⟨n⟩ = Σ |iii⟩`.
pub fn unit_tensor(n: usize) -> (SparseTensor3, Rank1Decomposition) {
    let triples = (1..=n).map(|i| [unit(n, i), unit(n, i), unit(n, i)]).collect();
    let dec = Rank1Decomposition { dims: [n; 3], triples };
    (dec.to_tensor(), dec)
}

pub const DEFAULT_COEFF_RANGE: i64 = 3;

fn random_vector(rng: &mut ChaCha8Rng, n: usize, range: i64) -> Vec<Rational> {
    loop {
        let v: Vec<Rational> =
            (0..n).map(|_| Rational::from_integer(BigInt::from(rng.gen_range(-range..=range)))).collect();
        if is_nonzero_vector(&v) {
            return v;
        }
    }
}

/// Sum of `r` random integer rank-one terms with entries in `[-range, range]`.
pub fn random_low_rank(
    dims: [usize; 3],
    r: usize,
    range: i64,
    seed: u64,
) -> (SparseTensor3, Rank1Decomposition) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_low_rank_with(&mut rng, dims, r, range)
}

pub fn random_low_rank_with(
    rng: &mut ChaCha8Rng,
    dims: [usize; 3],
    r: usize,
    range: i64,
) -> (SparseTensor3, Rank1Decomposition) {
    let triples = (0..r)
        .map(|_| std::array::from_fn(|k| random_vector(rng, dims[k], range)))
        .collect();
    let dec = Rank1Decomposition { dims, triples };
    (dec.to_tensor(), dec)
}

/// Dense integer tensor with independent uniform entries in `[-range, range]`.
pub fn random_dense(rng: &mut ChaCha8Rng, dims: [usize; 3], range: i64) -> SparseTensor3 {
    let mut t = SparseTensor3::zeros(dims);
    for i in 1..=dims[0] {
        for j in 1..=dims[1] {
            for k in 1..=dims[2] {
                let v = rng.gen_range(-range..=range);
                t.add([i, j, k], Rational::from_integer(v.into())).expect("in range");
            }
        }
    }
    t
}

/// Random invertible integer matrix with entries in `[-range, range]`.
pub fn random_invertible(rng: &mut ChaCha8Rng, n: usize, range: i64) -> QMatrix {
    loop {
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-range..=range)).collect()).collect();
        let m = QMatrix::from_ints(&rows);
        if !m.det().expect("square").is_zero() {
            return m;
        }
    }
}

/// Random lower-unitriangular integer matrix.
pub fn random_lower_unitriangular(rng: &mut ChaCha8Rng, n: usize, range: i64) -> QMatrix {
    let mut m = QMatrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            m.set(i, j, Rational::from_integer(rng.gen_range(-range..=range).into()));
        }
    }
    m
}

// ---- JSON ----

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryJson {
    pub idx: [usize; 3],
    pub num: String,
    pub den: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub triples: Vec<[Vec<String>; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorJson {
    pub dims: [usize; 3],
    pub entries: Vec<EntryJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionJson>,
}

impl TensorJson {
    pub fn from_parts(t: &SparseTensor3, dec: Option<&Rank1Decomposition>) -> Self {
        TensorJson {
            dims: t.dims,
            entries: t
                .entries
                .iter()
                .map(|(idx, v)| EntryJson { idx: *idx, num: v.numer().to_string(), den: v.denom().to_string() })
                .collect(),
            decomposition: dec.map(|d| DecompositionJson {
                triples: d
                    .triples
                    .iter()
                    .map(|tr| std::array::from_fn(|k| tr[k].iter().map(|x| x.to_string()).collect()))
                    .collect(),
            }),
        }
    }

    /// Parses and cross-checks: a carried decomposition must sum to the entries.
    pub fn into_parts(self) -> Result<(SparseTensor3, Option<Rank1Decomposition>)> {
        let mut t = SparseTensor3::zeros(self.dims);
        for e in &self.entries {
            let den = parse_bigint(&e.den)?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator at {:?}", e.idx)));
            }
            t.add(e.idx, Rational::new(parse_bigint(&e.num)?, den))?;
        }
        let dec = match self.decomposition {
            None => None,
            Some(dj) => {
                let triples = dj
                    .triples
                    .iter()
                    .map(|tr| -> Result<VectorTriple> {
                        Ok([
                            tr[0].iter().map(|s| parse_rational(s)).collect::<Result<_>>()?,
                            tr[1].iter().map(|s| parse_rational(s)).collect::<Result<_>>()?,
                            tr[2].iter().map(|s| parse_rational(s)).collect::<Result<_>>()?,
                        ])
                    })
                    .collect::<Result<Vec<_>>>()?;
                let dec = Rank1Decomposition::new(self.dims, triples)?;
                if dec.to_tensor() != t {
                    return Err(Error::DimensionMismatch(
                        "decomposition does not sum to the listed entries".into(),
                    ));
                }
                Some(dec)
            }
        };
        Ok((t, dec))
    }
}

pub fn tensor_to_json(t: &SparseTensor3, dec: Option<&Rank1Decomposition>) -> String {
    serde_json::to_string_pretty(&TensorJson::from_parts(t, dec)).expect("serializable")
}

pub fn tensor_from_json(s: &str) -> Result<(SparseTensor3, Option<Rank1Decomposition>)> {
    let tj: TensorJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    tj.into_parts()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn mamu_shapes() {
        let (t1, _) = mamu_tensor(1);
        assert_eq!(t1.nnz(), 1);
        assert_eq!(t1.get([1, 1, 1]), rat(1));
        let (t2, d2) = mamu_tensor(2);
        assert_eq!((t2.nnz(), t2.dims()), (8, [4, 4, 4]));
        assert_eq!(d2.rank_bound(), 8);
        let (t3, d3) = mamu_tensor(3);
        assert_eq!((t3.nnz(), t3.dims()), (27, [9, 9, 9]));
        assert!(t3.entries().all(|(_, v)| v == &rat(1)));
        assert_eq!(d3.to_tensor(), t3);
        // ⟨2,3,1⟩ = (|23⟩, |31⟩, |12⟩)
        let tr = &d3.triples()[mamu_label(3, 2, 3, 1)];
        assert_eq!(tr[0][pair_index(3, 2, 3) - 1], rat(1));
        assert_eq!(tr[1][pair_index(3, 3, 1) - 1], rat(1));
        assert_eq!(tr[2][pair_index(3, 1, 2) - 1], rat(1));
    }

    #[test]
    fn unit_tensors() {
        for n in [1, 3, 5] {
            let (t, d) = unit_tensor(n);
            assert_eq!(t.nnz(), n);
            assert_eq!(d.rank_bound(), n);
            assert_eq!(d.to_tensor(), t);
            assert!((1..=n).all(|i| t.get([i, i, i]) == rat(1)));
        }
    }

    #[test]
    fn random_low_rank_properties() {
        let (t0, d0) = random_low_rank([3, 3, 3], 0, 3, 1);
        assert_eq!(t0.nnz(), 0);
        assert_eq!(d0.rank_bound(), 0);
        let (t1, _) = random_low_rank([4, 3, 5], 1, 3, 99);
        for k in 0..3 {
            assert!(t1.flattening(k).rank() <= 1);
        }
        let (a, _) = random_low_rank([5, 5, 5], 6, 3, 42);
        let (b, _) = random_low_rank([5, 5, 5], 6, 3, 42);
        assert_eq!(a, b);
        for k in 0..3 {
            assert!(a.flattening(k).rank() <= 6);
        }
    }

    #[test]
    fn action_examples() {
        let (_, w) = unit_tensor(3);
        assert_eq!(act(&GroupElementTriple::identity([3, 3, 3]), &w).unwrap(), w);
        let mut d = vec![rat(1); 3];
        d[0] = rat(2);
        let g = QMatrix::diagonal(&d);
        let g = GroupElementTriple::new([g.clone(), g.clone(), g]).unwrap();
        let gw = act(&g, &w).unwrap().to_tensor();
        assert_eq!(gw.get([1, 1, 1]), rat(8));
        assert_eq!(gw.get([2, 2, 2]), rat(1));

        // a permutation triple permutes the support of M_2
        let (t2, w2) = mamu_tensor(2);
        let p = QMatrix::from_ints(&[vec![0, 1, 0, 0], vec![1, 0, 0, 0], vec![0, 0, 0, 1], vec![0, 0, 1, 0]]);
        let g = GroupElementTriple::new([p.clone(), p.clone(), p]).unwrap();
        let pt = act(&g, &w2).unwrap().to_tensor();
        assert_eq!(pt.nnz(), t2.nnz());
        assert!(pt.entries().all(|(_, v)| v == &rat(1)));
        assert_ne!(pt, t2);

        assert!(act(&GroupElementTriple::identity([2, 3, 3]), &w).is_err());
        assert!(GroupElementTriple::new([QMatrix::zeros(3, 3), QMatrix::identity(3), QMatrix::identity(3)]).is_err());
    }

    #[test]
    fn action_is_a_group_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let (_, w) = random_low_rank_with(&mut rng, [3, 3, 3], 3, 3);
            let g = GroupElementTriple::new(std::array::from_fn(|_| random_invertible(&mut rng, 3, 2))).unwrap();
            let h = GroupElementTriple::new(std::array::from_fn(|_| random_invertible(&mut rng, 3, 2))).unwrap();
            let lhs = act(&g.compose(&h).unwrap(), &w).unwrap().to_tensor();
            let rhs = act(&g, &act(&h, &w).unwrap()).unwrap().to_tensor();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let (t, d) = mamu_tensor(2);
        let s = tensor_to_json(&t, Some(&d));
        let (t2, d2) = tensor_from_json(&s).unwrap();
        assert_eq!(t2, t);
        assert_eq!(d2.unwrap(), d);
        let bad = r#"{"dims":[2,2,2],"entries":[{"idx":[1,1,1],"num":"1","den":"1"}],
            "decomposition":{"triples":[[["2","0"],["1","0"],["1","0"]]]}}"#;
        assert!(tensor_from_json(bad).is_err());
        let out_of_range = r#"{"dims":[2,2,2],"entries":[{"idx":[3,1,1],"num":"1","den":"1"}]}"#;
        assert!(tensor_from_json(out_of_range).is_err());
    }

    #[test]
    fn basis_decomposition_sums_back() {
        let (t, _) = random_low_rank([3, 2, 4], 2, 3, 11);
        assert_eq!(t.basis_decomposition().to_tensor(), t);
    }
}
