//! Exact rational scalars and the `p/q` wire format.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};
use std::str::FromStr;

use crate::error::Error;

/// Exact rational scalar used for weights, costs and LP coefficients.
pub type Q = BigRational;

/// Rational from an integer.
pub fn qi(p: i64) -> Q {
    Q::from_integer(BigInt::from(p))
}

/// Rational from a numerator/denominator pair.
pub fn qr(p: i64, q: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `p` or `p/q`. The denominator must be positive and non-zero.
pub fn parse_q(s: &str) -> Result<Q, Error> {
    let bad = || Error::Input(format!("malformed rational {s:?}, expected p or p/q"));
    let (ps, qs) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let p = BigInt::from_str(ps.trim()).map_err(|_| bad())?;
    let q = BigInt::from_str(qs.trim()).map_err(|_| bad())?;
    if q.is_zero() {
        return Err(Error::Input(format!("zero denominator in rational {s:?}")));
    }
    if q.is_negative() {
        return Err(Error::Input(format!(
            "negative denominator in rational {s:?}"
        )));
    }
    Ok(Q::new(p, q))
}

/// Canonical `p/q` form, always with an explicit denominator, lowest terms.
pub fn format_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Least common multiple of the denominators of `xs`; 1 for an empty slice.
pub fn denominator_lcm<'a>(xs: impl Iterator<Item = &'a Q>) -> BigInt {
    let mut l = BigInt::one();
    for x in xs {
        l = l.lcm(x.denom());
    }
    l
}

/// Scales rationals to exact integers by the common denominator `scale`.
pub fn scale_to_integers(xs: &[Q], scale: &BigInt) -> Vec<BigInt> {
    xs.iter()
        .map(|x| {
            let v = x * Q::from_integer(scale.clone());
            debug_assert!(v.is_integer());
            v.to_integer()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0/1", "3/1", "-3/2", "7/4"] {
            let x = parse_q(s).unwrap();
            assert_eq!(format_q(&x), s);
        }
        assert_eq!(format_q(&parse_q("4/2").unwrap()), "2/1");
        assert_eq!(format_q(&parse_q("5").unwrap()), "5/1");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("1/-2").is_err());
        assert!(parse_q("a/b").is_err());
    }

    #[test]
    fn scaling_is_exact() {
        let xs = [qr(1, 2), qr(2, 3), qi(4)];
        let l = denominator_lcm(xs.iter());
        assert_eq!(l, BigInt::from(6));
        let ints = scale_to_integers(&xs, &l);
        assert_eq!(ints, vec![BigInt::from(3), BigInt::from(4), BigInt::from(24)]);
    }
}
