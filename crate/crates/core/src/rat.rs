//! Exact rational scalars.
//!
//! All set-level computation in this crate is carried out over `Rat`
//! (arbitrary-precision rationals); no floating point enters any decision.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Rat = num_rational::BigRational;

/// Integer as a rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `p/q` as a rational. Panics if `q == 0`.
pub fn frac(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn is_zero(r: &Rat) -> bool {
    r.is_zero()
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise (reduced, q > 0).
pub fn fmt_rat(r: &Rat) -> String {
    r.to_string()
}

/// Parses `"p"` or `"p/q"` (optionally signed). Reduces to canonical form.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| format!("bad numerator in '{s}'"))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| format!("bad denominator in '{s}'"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in '{s}'"));
    }
    Ok(Rat::new(n, d))
}

/// Approximate value for reporting only (never used in set computations).
pub fn rat_to_f64(r: &Rat) -> f64 {
    let n = r.numer();
    let d = r.denom();
    // Good enough for plots and report fields at desk scale.
    let nf = n.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let df = d.to_string().parse::<f64>().unwrap_or(f64::NAN);
    nf / df
}

pub fn abs(r: &Rat) -> Rat {
    r.abs()
}

pub fn max_rat<'a>(a: &'a Rat, b: &'a Rat) -> &'a Rat {
    if a >= b {
        a
    } else {
        b
    }
}

/// 2^-k as a rational.
pub fn dyadic(k: u32) -> Rat {
    Rat::new(BigInt::one(), BigInt::from(2u8).pow(k))
}
