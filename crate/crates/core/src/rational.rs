//! Exact rational helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// All probabilities, previsions, stakes and LP entries are exact rationals.
pub type Rat = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rat {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// `2^-k`.
pub fn dyadic(k: u32) -> Rat {
    BigRational::new(BigInt::one(), BigInt::one() << k as usize)
}

pub fn in_unit_interval(r: &Rat) -> bool {
    !r.is_negative() && *r <= Rat::one()
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.35` exactly.
pub fn parse_rational(text: &str) -> Result<Rat, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty number".into());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| format!("bad numerator in `{s}`"))?;
        let q: BigInt = q.trim().parse().map_err(|_| format!("bad denominator in `{s}`"))?;
        if q.is_zero() {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(BigRational::new(p, q));
    }
    let (neg, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(format!("not a number: `{s}`"));
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(format!("not a number: `{s}`"));
    }
    let digits = format!("{whole}{frac}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| format!("not a number: `{s}`"))?
    };
    let denom = num_traits::pow(BigInt::from(10u32), frac.len());
    let value = BigRational::new(numer, denom);
    Ok(if neg { -value } else { value })
}

/// The rational with the smallest denominator in the closed interval `[lo, hi]`.
pub fn simplest_in(lo: &Rat, hi: &Rat) -> Rat {
    assert!(lo <= hi, "simplest_in: empty interval");
    if hi.is_negative() {
        return -simplest_in(&-hi, &-lo);
    }
    if !lo.is_positive() {
        return Rat::zero();
    }
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    let next = &fl + Rat::one();
    if next <= *hi {
        return next;
    }
    // lo and hi share the integer part; recurse on the reciprocal of the fractional parts.
    let inner = simplest_in(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

pub fn mid(a: &Rat, b: &Rat) -> Rat {
    (a + b) / int(2)
}

/// Least common multiple of the denominators, used to scale rational rows to integers.
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}
