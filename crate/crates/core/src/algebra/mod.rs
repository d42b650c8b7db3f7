//! Exact scalars, partitions and polynomials.

pub mod linalg;
pub mod partition;
pub mod poly;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};

pub use linalg::{det_bigint, det_columns, rank_bigint, QMatrix};
pub use partition::{Partition, PartitionTriple};
pub use poly::{poly_det, var_index, MultiPoly, PolyMatrix};

/// Reduced fraction with positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p"` or `"p/q"` with arbitrary-precision integers.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.trim().parse().map_err(|e| Error::Parse(format!("bad numerator {n:?}: {e}")))?;
    let d: BigInt = d.trim().parse().map_err(|e| Error::Parse(format!("bad denominator {d:?}: {e}")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(n, d))
}

pub fn parse_bigint(s: &str) -> Result<BigInt> {
    s.trim().parse().map_err(|e| Error::Parse(format!("bad integer {s:?}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_are_reduced() {
        let r = parse_rational("6/-4").unwrap();
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(parse_rational("0/5").unwrap(), rat(0));
        assert_eq!(rat(0).denom(), &BigInt::from(1));
        assert!(parse_rational("1/0").is_err());
        assert_eq!(parse_rational("-7").unwrap().to_string(), "-7");
    }
}
