//! Exact rational helpers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// The exact scalar type used throughout the crate.
pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Formats as `p/q` in lowest terms, or `p` when the denominator is one.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p`, `p/q` or a finite decimal such as `0.25`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::validation(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.starts_with('-');
        let ip = if ip.is_empty() || ip == "-" || ip == "+" {
            "0"
        } else {
            ip
        };
        let whole: BigInt = ip.parse().map_err(|_| bad())?;
        let frac: BigInt = fp.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), fp.len());
        let mut v = Q::from_integer(whole.abs()) + Q::new(frac, scale);
        if neg {
            v = -v;
        }
        return Ok(v);
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(n))
}

/// Decimal rendering with `digits` places after the point, truncated
/// toward zero. For human display only.
pub fn fmt_decimal(x: &Q, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (x.abs() * Q::from_integer(scale.clone())).to_integer();
    let (ip, fp) = scaled.div_rem(&scale);
    let sign = if x.is_negative() && !scaled.is_zero() {
        "-"
    } else {
        ""
    };
    if digits == 0 {
        return format!("{sign}{ip}");
    }
    format!("{sign}{ip}.{:0>width$}", fp.to_string(), width = digits)
}

/// Least common multiple of the denominators.
pub fn lcm_denoms<'a>(xs: impl IntoIterator<Item = &'a Q>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Scales a rational vector to a primitive integer vector (gcd 1) with the
/// same direction. The zero vector maps to itself.
pub fn primitive_integer(xs: &[Q]) -> Vec<BigInt> {
    let l = lcm_denoms(xs);
    let ints: Vec<BigInt> = xs
        .iter()
        .map(|x| (x * Q::from_integer(l.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Q::zero(), |acc, (x, y)| acc + x * y)
}
