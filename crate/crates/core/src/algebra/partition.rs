use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// An integer partition stored as its nonincreasing list of positive parts.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidPartition(format!("{parts:?} has a zero part")));
        }
        if !parts.windows(2).all(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPartition(format!("{parts:?} is not nonincreasing")));
        }
        Ok(Partition { parts })
    }

    /// Sorts and drops zeros, so any multiset of sizes becomes a partition.
    pub fn from_unsorted(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Part `i` (0-based), zero past the end.
    pub fn part(&self, i: usize) -> usize {
        self.parts.get(i).copied().unwrap_or(0)
    }

    /// The conjugate partition: column lengths of the Young diagram.
    pub fn transpose(&self) -> Partition {
        let width = self.part(0);
        let parts = (0..width)
            .map(|c| self.parts.iter().take_while(|&&p| p > c).count())
            .collect();
        Partition { parts }
    }

    /// True when the diagram is a rectangle `(c, c, ..., c)`.
    pub fn is_rectangle(&self) -> bool {
        self.parts.windows(2).all(|w| w[0] == w[1])
    }

    /// All partitions of `n` with at most `max_len` parts, in reverse lexicographic order.
    pub fn all(n: usize, max_len: usize) -> Vec<Partition> {
        fn rec(rest: usize, max_part: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition { parts: cur.clone() });
                return;
            }
            if slots == 0 {
                return;
            }
            for p in (1..=max_part.min(rest)).rev() {
                cur.push(p);
                rec(rest - p, p, slots - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, max_len, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Partition::default());
        }
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad part {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

/// Three partitions `(λ¹, λ², λ³)`, usually of a common size.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartitionTriple {
    pub components: [Partition; 3],
}

impl PartitionTriple {
    pub fn new(a: Partition, b: Partition, c: Partition) -> Self {
        PartitionTriple { components: [a, b, c] }
    }

    /// Common size of the components, if they agree.
    pub fn common_size(&self) -> Option<usize> {
        let d = self.components[0].size();
        self.components.iter().all(|p| p.size() == d).then_some(d)
    }

    pub fn max_len(&self) -> usize {
        self.components.iter().map(Partition::len).max().unwrap_or(0)
    }

    /// `λ ⊢*_n d`: every component has size `d` and at most `n` parts.
    pub fn fits(&self, n: usize, d: usize) -> bool {
        self.components.iter().all(|p| p.size() == d && p.len() <= n)
    }

    /// Every triple of partitions of `d` with at most `max_len` parts each.
    pub fn all(d: usize, max_len: usize) -> Vec<PartitionTriple> {
        let ps = Partition::all(d, max_len);
        let mut out = Vec::new();
        for a in &ps {
            for b in &ps {
                for c in &ps {
                    out.push(PartitionTriple::new(a.clone(), b.clone(), c.clone()));
                }
            }
        }
        out
    }
}

impl fmt::Display for PartitionTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = &self.components;
        write!(f, "{a}|{b}|{c}")
    }
}

impl FromStr for PartitionTriple {
    type Err = Error;

    /// Parses `"3,1|2,2|2,1,1"`.
    fn from_str(s: &str) -> Result<Self> {
        let comps: Vec<&str> = s.split('|').collect();
        if comps.len() != 3 {
            return Err(Error::Parse(format!(
                "expected three '|'-separated partitions, got {}",
                comps.len()
            )));
        }
        Ok(PartitionTriple::new(
            comps[0].parse()?,
            comps[1].parse()?,
            comps[2].parse()?,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn transpose_examples() {
        assert_eq!(p(&[3, 1]).transpose(), p(&[2, 1, 1]));
        assert_eq!(p(&[]).transpose(), p(&[]));
        let hook = p(&[9, 1, 1, 1, 1, 1, 1, 1, 1]);
        assert_eq!(hook.transpose(), hook);
        assert_eq!(p(&[4, 4]).transpose(), p(&[2, 2, 2, 2]));
    }

    #[test]
    fn rejects_bad_parts() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
    }

    #[test]
    fn partition_counts() {
        // p(6) = 11, p(6 | at most 3 parts) = 7
        assert_eq!(Partition::all(6, 6).len(), 11);
        assert_eq!(Partition::all(6, 3).len(), 7);
        assert_eq!(Partition::all(0, 3), vec![Partition::default()]);
    }

    #[test]
    fn parse_triple() {
        let t: PartitionTriple = "3,1|2,2|2,1,1".parse().unwrap();
        assert_eq!(t.common_size(), Some(4));
        assert_eq!(t.to_string(), "3,1|2,2|2,1,1");
        assert!("3,1|2,2".parse::<PartitionTriple>().is_err());
        assert!("1,3|2,2|4".parse::<PartitionTriple>().is_err());
    }

    fn arb_partition() -> impl Strategy<Value = Partition> {
        (0usize..=30).prop_flat_map(|n| {
            let all = Partition::all(n, n);
            (0..all.len()).prop_map(move |i| all[i].clone())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn transpose_is_involution(lam in arb_partition()) {
            prop_assert_eq!(lam.transpose().transpose(), lam.clone());
            prop_assert_eq!(lam.transpose().size(), lam.size());
        }
    }
}
