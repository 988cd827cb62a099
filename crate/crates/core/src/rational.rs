//! Exact rational helpers and the `"p/q"` string encoding used by every file format.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Q = BigRational;

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn zeros(len: usize) -> Vec<Q> {
    vec![Q::zero(); len]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational {:?}: {}", self.input, self.reason)
    }
}

impl std::error::Error for ParseRationalError {}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s).ok()
}

/// Parses `"p"` or `"p/q"` with decimal integers. Decimal points, exponents and
/// whitespace are rejected so that every accepted string denotes one exact value.
pub fn parse_rational(s: &str) -> Result<Q, ParseRationalError> {
    let err = |reason| ParseRationalError {
        input: s.to_string(),
        reason,
    };
    if s.contains('.') || s.contains('e') || s.contains('E') {
        return Err(err("decimal notation is not allowed, use p/q"));
    }
    match s.split_once('/') {
        None => parse_int(s).map(Q::from_integer).ok_or_else(|| err("not an integer")),
        Some((p, d)) => {
            let p = parse_int(p).ok_or_else(|| err("bad numerator"))?;
            let d = parse_int(d).ok_or_else(|| err("bad denominator"))?;
            if d.is_zero() {
                return Err(err("zero denominator"));
            }
            Ok(Q::new(p, d))
        }
    }
}

/// Canonical form: reduced, positive denominator, integers without `/1`.
pub fn format_rational(x: &Q) -> String {
    x.to_string()
}

/// A rational that (de)serializes as a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatStr(pub Q);

impl Serialize for RatStr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

struct RatVisitor;

impl serde::de::Visitor<'_> for RatVisitor {
    type Value = RatStr;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an exact rational string \"p/q\" or an integer")
    }

    fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<RatStr, E> {
        parse_rational(v).map(RatStr).map_err(E::custom)
    }

    fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<RatStr, E> {
        Ok(RatStr(Q::from_integer(BigInt::from(v))))
    }

    fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<RatStr, E> {
        Ok(RatStr(Q::from_integer(BigInt::from(v))))
    }

    fn visit_f64<E: serde::de::Error>(self, v: f64) -> Result<RatStr, E> {
        Err(E::custom(format!("floating-point number {v} is not an exact rational; write it as \"p/q\"")))
    }
}

impl<'de> Deserialize<'de> for RatStr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(RatVisitor)
    }
}

impl From<Q> for RatStr {
    fn from(q: Q) -> Self {
        RatStr(q)
    }
}

impl From<&Q> for RatStr {
    fn from(q: &Q) -> Self {
        RatStr(q.clone())
    }
}

pub fn to_strs(v: &[Q]) -> Vec<RatStr> {
    v.iter().map(RatStr::from).collect()
}

pub fn from_strs(v: &[RatStr]) -> Vec<Q> {
    v.iter().map(|r| r.0.clone()).collect()
}

pub fn sup_norm(v: &[Q]) -> Q {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(Q::zero)
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

/// Nearest multiple of `2^-bits` (ties away from zero).
pub fn round_to_dyadic(x: &Q, bits: u32) -> Q {
    let scale = BigInt::one() << bits;
    let scaled = x * Q::from_integer(scale.clone());
    Q::new(scaled.round().to_integer(), scale)
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Dyadic approximation of a float; only used to build heuristic seeds.
pub fn from_f64_dyadic(x: f64, bits: u32) -> Q {
    let scaled = (x * f64::from(2u32).powi(bits as i32)).round();
    let num = BigInt::from(scaled as i128);
    Q::new(num, BigInt::one() << bits)
}

pub fn lcm_of_denominators(v: &[Q]) -> BigInt {
    v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

pub fn gcd_of(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

/// Primitive integral vector on the ray of `v` with lexicographically positive
/// leading coordinate. Returns `None` for the zero vector.
pub fn primitive_normal(v: &[Q]) -> Option<Vec<BigInt>> {
    let l = lcm_of_denominators(v);
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * Q::from_integer(l.clone())).to_integer())
        .collect();
    let g = gcd_of(&ints);
    if g.is_zero() {
        return None;
    }
    let mut out: Vec<BigInt> = ints.into_iter().map(|x| x / &g).collect();
    if let Some(first) = out.iter().find(|x| !x.is_zero()) {
        if first.sign() == Sign::Minus {
            out.iter_mut().for_each(|x| *x = -x.clone());
        }
    }
    Some(out)
}

pub fn int_vec_to_q(v: &[BigInt]) -> Vec<Q> {
    v.iter().map(|x| Q::from_integer(x.clone())).collect()
}

/// The rational with the smallest denominator in the closed interval `[lo, hi]`
/// (continued-fraction descent).
pub fn simplest_in_closed(lo: &Q, hi: &Q) -> Q {
    assert!(lo <= hi);
    if lo.is_positive() || lo.is_zero() {
        simplest_nonneg(lo, hi)
    } else if hi.is_negative() {
        -simplest_nonneg(&-hi.clone(), &-lo.clone())
    } else {
        Q::zero()
    }
}

fn simplest_nonneg(lo: &Q, hi: &Q) -> Q {
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    if fl.clone() + Q::one() <= *hi {
        return fl + Q::one();
    }
    // lo and hi share the integer part and lo is not an integer
    let lo_frac = lo - &fl;
    let hi_frac = hi - &fl;
    let inner = simplest_nonneg(&hi_frac.recip(), &lo_frac.recip());
    fl + inner.recip()
}

/// Integer square root bound: smallest integer `s >= 0` with `s^2 >= x` for `x >= 0`.
pub fn ceil_sqrt(x: &Q) -> BigInt {
    if !x.is_positive() {
        return BigInt::zero();
    }
    let c = x.ceil().to_integer();
    let mut s = c.sqrt();
    while Q::from_integer(&s * &s) < *x {
        s += 1;
    }
    s
}
