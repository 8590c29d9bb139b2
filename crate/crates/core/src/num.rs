//! Small helpers over big integers and exact rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(Int::from(p), Int::from(q))
}

pub fn rat_int(v: &Int) -> Rat {
    Rat::from_integer(v.clone())
}

/// Parses "p/q", an integer, or a finite decimal such as "1.618".
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Domain(format!("not a rational literal: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: Int = p.trim().parse().map_err(|_| bad())?;
        let q: Int = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let neg = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches('-'), frac);
        let n: Int = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(int(10), frac.len());
        let v = Rat::new(n, d);
        return Ok(if neg { -v } else { v });
    }
    let n: Int = s.parse().map_err(|_| bad())?;
    Ok(Rat::from_integer(n))
}

pub fn pow_int(base: u64, exp: usize) -> Int {
    num_traits::pow(Int::from(base), exp)
}

/// b^(-k) as an exact rational.
pub fn neg_pow(base: u64, k: usize) -> Rat {
    Rat::new(Int::one(), pow_int(base, k))
}

/// Floor of the square root, for nonnegative input.
pub fn isqrt(v: &Int) -> Int {
    if v.is_negative() {
        return Int::zero();
    }
    num_integer::Roots::sqrt(v)
}

pub fn ceil_sqrt(v: &Int) -> Int {
    let r = isqrt(v);
    if &(&r * &r) == v {
        r
    } else {
        r + 1
    }
}

pub fn floor_rat(v: &Rat) -> Int {
    v.numer().div_floor(v.denom())
}

pub fn ceil_rat(v: &Rat) -> Int {
    -((-v.numer()).div_floor(v.denom()))
}

pub fn modulo(v: &Int, m: usize) -> usize {
    v.mod_floor(&Int::from(m)).to_usize().expect("residue fits")
}

pub fn gcd_u(a: usize, b: usize) -> usize {
    a.gcd(&b)
}

pub fn lcm_u(a: usize, b: usize) -> usize {
    a / a.gcd(&b) * b
}

pub fn to_i64(v: &Int) -> Result<i64> {
    v.to_i64()
        .ok_or_else(|| Error::Budget(format!("index {v} exceeds the explicit range")))
}

pub fn to_usize(v: &Int) -> Result<usize> {
    v.to_usize()
        .ok_or_else(|| Error::Budget(format!("length {v} exceeds the explicit range")))
}

/// Natural log of a positive big integer as f64.
pub fn ln_int(v: &Int) -> f64 {
    let bits = v.bits();
    if bits < 1000 {
        return v.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 60;
    let top: Int = v >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn rat_to_f64(v: &Rat) -> f64 {
    v.to_f64().unwrap_or_else(|| {
        let n = ln_int(&v.numer().abs());
        let d = ln_int(v.denom());
        let s = if v.is_negative() { -1.0 } else { 1.0 };
        s * (n - d).exp()
    })
}

/// Renders a rational as "p/q" (or "p" when integral).
pub fn fmt_rat(v: &Rat) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}
