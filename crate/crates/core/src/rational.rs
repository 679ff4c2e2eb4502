//! Exact rational helpers on top of `num-rational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Always `num/den`, including integers (`1/1`).
pub fn format(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| Error::Parse(format!("bad rational numerator in {s:?}")))?;
    let den: BigInt = den.parse().map_err(|_| Error::Parse(format!("bad rational denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

pub fn to_f64(r: &Rational) -> f64 {
    // Big numerators/denominators overflow `f64` individually; scale first.
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let bits = r.numer().bits().max(r.denom().bits()) as i64;
    let shift = (bits - 900).max(0) as usize;
    let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
    if d == 0.0 {
        return if r.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    n / d
}

pub fn pow(base: &Rational, exp: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// `C(2n, n) / 4^n`.
pub fn central_binomial_over_four_pow(n: u64) -> Rational {
    let mut r = Rational::one();
    for k in 1..=n {
        // C(2k,k)/4^k = C(2k-2,k-1)/4^(k-1) * (2k-1)/(2k)
        r *= ratio(2 * k as i64 - 1, 2 * k as i64);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse("2/4").unwrap(), ratio(1, 2));
        assert_eq!(parse(" -3 ").unwrap(), int(-3));
        assert_eq!(format(&int(1)), "1/1");
        assert!(parse("1/0").is_err());
        assert!(parse("x/2").is_err());
    }

    #[test]
    fn huge_to_f64() {
        let big = Rational::new(BigInt::from(3) << 2000usize, BigInt::from(8) << 2000usize);
        assert!((to_f64(&big) - 0.375).abs() < 1e-15);
    }

    #[test]
    fn central_binomial() {
        assert_eq!(central_binomial_over_four_pow(0), int(1));
        assert_eq!(central_binomial_over_four_pow(1), ratio(1, 2));
        assert_eq!(central_binomial_over_four_pow(5), ratio(63, 256));
    }
}
