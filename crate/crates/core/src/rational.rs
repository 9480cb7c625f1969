//! Exact rationals and their string form (`"p/q"` or `"n"`).

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

/// `num / den` as an exact rational. Panics on a zero denominator.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn half() -> Q {
    q(1, 2)
}

/// Smallest integer `>= x`, which must fit in an `i64`.
pub fn ceil_i64(x: &Q) -> i64 {
    x.ceil().to_integer().to_i64().expect("rational out of i64 range")
}

pub fn floor_i64(x: &Q) -> i64 {
    x.floor().to_integer().to_i64().expect("rational out of i64 range")
}

pub fn to_i64(x: &Q) -> Option<i64> {
    if x.is_integer() {
        x.to_integer().to_i64()
    } else {
        None
    }
}

/// Parses `"p/q"` or `"n"`. The fraction must be reduced, with a positive
/// denominator; `"0"` is the only accepted form of zero.
pub fn parse(s: &str) -> Result<Q> {
    let bad = || Error::MalformedRational(s.to_string());
    let int = |t: &str| -> Result<BigInt> {
        let digits = t.strip_prefix('-').unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        if digits.len() > 1 && digits.starts_with('0') {
            return Err(bad());
        }
        t.parse::<BigInt>().map_err(|_| bad())
    };
    match s.split_once('/') {
        None => {
            let n = int(s)?;
            if s == "-0" {
                return Err(bad());
            }
            Ok(Q::from_integer(n))
        }
        Some((n, d)) => {
            let n = int(n)?;
            if d.starts_with('-') {
                return Err(bad());
            }
            let d = int(d)?;
            if d.is_zero() || d.is_one() || !n.gcd(&d).is_one() {
                return Err(bad());
            }
            Ok(Q::new_raw(n, d))
        }
    }
}

/// Canonical string form; inverse of [`parse`].
pub fn format(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        let (n, d) = (x.numer(), x.denom());
        debug_assert!(d.is_positive());
        format!("{n}/{d}")
    }
}

/// Least common multiple of the denominators.
pub fn denominator_lcm<'a>(xs: impl IntoIterator<Item = &'a Q>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Is `x` an integer?
pub fn is_integral(x: &Q) -> bool {
    x.is_integer()
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_reduced_forms() {
        assert_eq!(parse("3/10").unwrap(), q(3, 10));
        assert_eq!(parse("-1/5").unwrap(), q(-1, 5));
        assert_eq!(parse("7").unwrap(), qi(7));
        assert_eq!(parse("0").unwrap(), qi(0));
    }

    #[test]
    fn rejects_unreduced_and_malformed() {
        for s in ["2/4", "1/0", "3/1", "1/-2", "", "-", "1.5", "0/1", "01", "-0", "+3", "1/ 2"] {
            assert!(parse(s).is_err(), "{s:?} should be rejected");
        }
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(ceil_i64(&q(1, 4)), 1);
        assert_eq!(ceil_i64(&q(-1, 4)), 0);
        assert_eq!(floor_i64(&q(-1, 4)), -1);
        assert_eq!(ceil_i64(&qi(3)), 3);
    }

    proptest! {
        #[test]
        fn format_parse_round_trip(n in -10_000i64..10_000, d in 1i64..500) {
            let x = q(n, d);
            let s = format(&x);
            prop_assert_eq!(parse(&s).unwrap(), x);
        }
    }
}
