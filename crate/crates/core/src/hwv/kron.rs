//! Kronecker coefficients from symmetric-group characters.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::{Partition, PartitionTriple, Rational};
use crate::error::{Error, Result};

pub const MAX_KRON_DEGREE: usize = 12;

type Memo = HashMap<(Vec<usize>, Vec<usize>), BigInt>;

/// `χ_λ(ρ)` by the Murnaghan–Nakayama rule on beta sets.
pub fn character(lambda: &Partition, rho: &[usize]) -> BigInt {
    let mut memo = Memo::new();
    mn(lambda.parts(), rho, &mut memo)
}

fn mn(lambda: &[usize], rho: &[usize], memo: &mut Memo) -> BigInt {
    let Some((&r, rest)) = rho.split_first() else {
        return if lambda.is_empty() { BigInt::one() } else { BigInt::zero() };
    };
    let key = (lambda.to_vec(), rho.to_vec());
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let l = lambda.len();
    let beta: Vec<usize> = lambda.iter().enumerate().map(|(i, &p)| p + (l - 1 - i)).collect();
    let mut total = BigInt::zero();
    for i in 0..l {
        if beta[i] < r || beta.contains(&(beta[i] - r)) {
            continue;
        }
        let target = beta[i] - r;
        let height = beta.iter().filter(|&&b| b > target && b < beta[i]).count();
        let mut nb = beta.clone();
        nb[i] = target;
        nb.sort_unstable_by(|a, b| b.cmp(a));
        let mu: Vec<usize> = nb.iter().enumerate().map(|(j, &b)| b - (l - 1 - j)).filter(|&p| p > 0).collect();
        let v = mn(&mu, rest, memo);
        if height % 2 == 0 {
            total += v;
        } else {
            total -= v;
        }
    }
    memo.insert(key, total.clone());
    total
}

/// `z_ρ = Π_i i^{m_i} m_i!`, the centralizer order of cycle type `ρ`.
fn centralizer(rho: &Partition) -> BigInt {
    let mut z = BigInt::one();
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for &p in rho.parts() {
        *counts.entry(p).or_default() += 1;
    }
    for (i, m) in counts {
        for j in 1..=m {
            z *= BigInt::from(i) * BigInt::from(j);
        }
    }
    z
}

/// `k(λ) = Σ_ρ χ_{λ¹}(ρ) χ_{λ²}(ρ) χ_{λ³}(ρ) / z_ρ`.
pub fn kronecker_coefficient(lambda: &PartitionTriple) -> Result<BigInt> {
    let d = lambda
        .common_size()
        .ok_or_else(|| Error::InvalidPartition(format!("components of {lambda} differ in size")))?;
    if d > MAX_KRON_DEGREE {
        return Err(Error::ScaleExceeded(format!("d = {d} exceeds {MAX_KRON_DEGREE}")));
    }
    let mut memo = Memo::new();
    let mut acc = Rational::zero();
    for rho in Partition::all(d, d) {
        let prod: BigInt = lambda.components.iter().map(|c| mn(c.parts(), rho.parts(), &mut memo)).product();
        if !prod.is_zero() {
            acc += Rational::new(prod, centralizer(&rho));
        }
    }
    if !acc.is_integer() {
        return Err(Error::CertificateRejected(format!("non-integral character sum {acc}")));
    }
    Ok(acc.to_integer())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn character_values() {
        // S_3 table
        assert_eq!(character(&p(&[2, 1]), &[1, 1, 1]), BigInt::from(2));
        assert_eq!(character(&p(&[2, 1]), &[2, 1]), BigInt::from(0));
        assert_eq!(character(&p(&[2, 1]), &[3]), BigInt::from(-1));
        assert_eq!(character(&p(&[1, 1, 1]), &[2, 1]), BigInt::from(-1));
        // dimension of (3,2) is 5, of (2,2,1,1) is 9
        assert_eq!(character(&p(&[3, 2]), &[1; 5]), BigInt::from(5));
        assert_eq!(character(&p(&[2, 2, 1, 1]), &[1; 6]), BigInt::from(9));
    }

    #[test]
    fn column_orthogonality() {
        for d in 1..=7 {
            let ps = Partition::all(d, d);
            for rho in &ps {
                let s: BigInt = ps.iter().map(|l| character(l, rho.parts()).pow(2)).sum();
                assert_eq!(s, centralizer(rho));
            }
        }
    }

    #[test]
    fn kronecker_examples() {
        let k = |s: &str| kronecker_coefficient(&s.parse().unwrap()).unwrap();
        assert_eq!(k("2|2|2"), BigInt::from(1));
        assert_eq!(k("1,1|1,1|2"), BigInt::from(1));
        assert_eq!(k("2|2|1,1"), BigInt::from(0));
        assert_eq!(k("2,2,2,2|2,2,2,2|2,2,2,2"), BigInt::from(1));
        assert_eq!(k("2,1|2,1|2,1"), BigInt::from(1));
        assert_eq!(k("3,1,1,1,1|3,1,1,1,1|3,1,1,1,1"), BigInt::from(1));
        assert!(kronecker_coefficient(&"13|13|13".parse().unwrap()).is_err());
    }
}
