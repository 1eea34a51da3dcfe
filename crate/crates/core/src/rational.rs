//! Exact rational scalars: parsing, formatting and robust float conversion.
//!
//! All map data (contraction ratios, translations, probability weights) is
//! kept as arbitrary-precision rationals so that products, overlap tests and
//! stopping-time comparisons are decidable without tolerances. Floating point
//! enters only through logarithms when dimension values are produced.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumberParseError {
    #[error("empty numeric string")]
    Empty,
    #[error("malformed number `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses `"p/q"`, integer and decimal strings into an exact rational.
///
/// Decimals convert exactly (`"0.55"` becomes `11/20`); no binary rounding is
/// involved at any point.
pub fn parse_rational(s: &str) -> Result<Rat, NumberParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(NumberParseError::Empty);
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_decimal(num).ok_or_else(|| NumberParseError::Malformed(s.to_string()))?;
        let d = parse_decimal(den).ok_or_else(|| NumberParseError::Malformed(s.to_string()))?;
        if d.is_zero() {
            return Err(NumberParseError::ZeroDenominator(s.to_string()));
        }
        return Ok(n / d);
    }
    parse_decimal(s).ok_or_else(|| NumberParseError::Malformed(s.to_string()))
}

fn parse_decimal(s: &str) -> Option<Rat> {
    let s = s.trim();
    let (sign, digits) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    if digits.is_empty() {
        return None;
    }
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let numer: BigInt = joined.parse().ok()?;
    let denom = BigInt::from(10u8).pow(frac_part.len() as u32);
    Some(Rat::new(BigInt::from(sign) * numer, denom))
}

/// Canonical `"p/q"` (or plain integer) form used in reports and spec echoes.
pub fn format_rational(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// f64 value of a rational whose numerator/denominator may far exceed f64 range.
pub fn rat_to_f64(r: &Rat) -> f64 {
    if r.numer().is_zero() {
        return 0.0;
    }
    let sign = if r.numer().is_negative() { -1.0 } else { 1.0 };
    let num = r.numer().abs();
    let den = r.denom().clone();
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let sh_n = (nb - 128).max(0);
    let sh_d = (db - 128).max(0);
    let n = (num >> sh_n as u64).to_f64().unwrap_or(f64::INFINITY);
    let d = (den >> sh_d as u64).to_f64().unwrap_or(f64::INFINITY);
    let mut q = sign * n / d;
    let mut e = sh_n - sh_d;
    // apply the power of two in chunks to avoid powi overflow on the way
    while e > 0 {
        let step = e.min(512);
        q *= 2f64.powi(step as i32);
        e -= step;
    }
    while e < 0 {
        let step = (-e).min(512);
        q /= 2f64.powi(step as i32);
        e += step;
    }
    q
}

/// Natural log of a positive rational, stable for values far outside f64 range.
pub fn ln_rat_f64(r: &Rat) -> f64 {
    debug_assert!(r.numer().is_positive(), "ln of non-positive rational");
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

fn ln_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 900 {
        x.to_f64().unwrap().ln()
    } else {
        let shift = bits - 64;
        let top = (x >> shift).to_f64().unwrap();
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Exact dyadic rational approximately equal to `exp(ln_value)`, valid far
/// outside the f64 range (the exponent is carried in the power of two).
pub fn rat_exp(ln_value: f64) -> Option<Rat> {
    if !ln_value.is_finite() {
        return None;
    }
    let t = ln_value / std::f64::consts::LN_2;
    let e = t.floor();
    let mantissa = 2f64.powf(t - e); // in [1, 2)
    let m = dyadic_from_f64(mantissa)?;
    let e = e as i64;
    let shift = BigInt::from(1u8) << e.unsigned_abs() as usize;
    Some(if e >= 0 {
        m * Rat::from_integer(shift)
    } else {
        m / Rat::from_integer(shift)
    })
}

/// Exact dyadic rational equal to a finite f64.
pub fn dyadic_from_f64(x: f64) -> Option<Rat> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some(Rat::zero());
    }
    let (mantissa, exponent, sign) = integer_decode(x);
    let mut r = Rat::from_integer(BigInt::from(sign as i64) * BigInt::from(mantissa));
    if exponent >= 0 {
        r *= Rat::from_integer(BigInt::from(1u8) << exponent as usize);
    } else {
        r /= Rat::from_integer(BigInt::from(1u8) << (-exponent) as usize);
    }
    Some(r)
}

fn integer_decode(x: f64) -> (u64, i16, i8) {
    let bits = x.to_bits();
    let sign: i8 = if bits >> 63 == 0 { 1 } else { -1 };
    let mut exponent = ((bits >> 52) & 0x7ff) as i16;
    let mantissa = if exponent == 0 {
        (bits & 0xf_ffff_ffff_ffff) << 1
    } else {
        (bits & 0xf_ffff_ffff_ffff) | 0x10_0000_0000_0000
    };
    exponent -= 1075;
    (mantissa, exponent, sign)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_and_decimal_forms() {
        assert_eq!(parse_rational("9/20").unwrap(), rat(9, 20));
        assert_eq!(parse_rational("0.55").unwrap(), rat(11, 20));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational("3").unwrap(), rat_int(3));
        assert_eq!(parse_rational(" 1/2 ").unwrap(), rat(1, 2));
    }

    #[test]
    fn rejects_malformed_numbers() {
        assert!(parse_rational("0.1.2").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/2").is_err());
        assert!(parse_rational("1e-3").is_err());
    }

    #[test]
    fn formats_round_trip() {
        for s in ["9/20", "-3/7", "5", "0"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }

    #[test]
    fn float_conversion_handles_huge_values() {
        let tiny = rat(1, 2).pow(4000);
        assert_eq!(rat_to_f64(&tiny), 0.0);
        let ln = ln_rat_f64(&tiny);
        assert!((ln - 4000.0 * (0.5f64).ln()).abs() < 1e-6);
        assert!((rat_to_f64(&rat(3, 4)) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn dyadic_is_exact() {
        let r = dyadic_from_f64(0.1).unwrap();
        assert_eq!(rat_to_f64(&r), 0.1);
        assert_ne!(r, rat(1, 10));
    }
}
