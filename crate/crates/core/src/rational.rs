//! Exact rational helpers.

use num::{BigInt, One, Signed, Zero};

use crate::{Error, Result};

pub type Rational = num::BigRational;

/// `n / d` as a reduced rational. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `n`, `-n`, `n/m` or `-n/m` (decimal integers; `m` non-zero).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = |msg: &str| Error::Parse {
        offset: 0,
        message: format!("{msg}: {s:?}"),
    };
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad("bad numerator"))?;
    let den: BigInt = den.parse().map_err(|_| bad("bad denominator"))?;
    if den.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

/// Canonical `p/q` text (reduced; integers print without a denominator).
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn in_unit_interval(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}

/// `1 / 2^k`
pub fn inverse_power_of_two(k: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k)
}
