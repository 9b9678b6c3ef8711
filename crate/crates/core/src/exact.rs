//! Exact rational arithmetic helpers.
//!
//! Tail probabilities of combinatorial events underflow or lose every digit in
//! `f64`, so probabilities may be carried as [`BigRational`]. Every finite
//! `f64` is itself a dyadic rational, which lets float-valued distributions
//! take part in exact tie-breaking as well.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Parses `"3/4"`, `"0.25"`, `"1e-3"`, `"-2.5E+2"` or `"7"` into an exact rational.
///
/// Decimal strings are read as the decimal number they spell, so `"0.1"`
/// becomes exactly `1/10`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bad = || Error::param("rational number", text);
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_rational(num)?;
        let den = parse_rational(den)?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(num / den);
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer: BigInt = all_digits.parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let mut value = if scale >= 0 {
        BigRational::from_integer(numer * ten.pow(scale as u64))
    } else {
        BigRational::new(numer, ten.pow(scale.unsigned_abs()))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// The exact dyadic value of a finite float.
pub fn from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Nearest `f64`, with graceful underflow to zero and overflow to infinity.
pub fn to_f64(q: &BigRational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    if let Some(v) = q.to_f64() {
        if v.is_finite() && v != 0.0 {
            return v;
        }
    }
    // Fall back to a log-scale reconstruction for magnitudes the direct
    // conversion cannot represent.
    let sign = if q.is_negative() { -1.0 } else { 1.0 };
    let ln = ln_abs(q);
    sign * ln.exp()
}

/// Natural log of `|q|`, accurate for rationals far outside the `f64` range.
pub fn ln_abs(q: &BigRational) -> f64 {
    ln_biguint(q.numer().magnitude()) - ln_biguint(q.denom().magnitude())
}

fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `q^e` for a nonnegative integer exponent.
pub fn pow(q: &BigRational, e: u64) -> BigRational {
    if e == 0 {
        return BigRational::one();
    }
    let e = u32::try_from(e).expect("exponent fits in u32");
    BigRational::new(q.numer().pow(e), q.denom().pow(e))
}

/// Compares `weight · ∏ factor_i^count_i` against `rhs`, exactly.
///
/// This is the exact arbiter used whenever a floating-point comparison of the
/// corresponding log quantities lands too close to its boundary to trust.
pub fn cmp_weighted_product(
    weight: &BigRational,
    factors: &[BigRational],
    counts: &[u64],
    rhs: &BigRational,
) -> Ordering {
    debug_assert_eq!(factors.len(), counts.len());
    let mut acc = weight.clone();
    for (f, &c) in factors.iter().zip(counts) {
        if c > 0 {
            acc *= pow(f, c);
        }
    }
    acc.cmp(rhs)
}
