//! Arithmetic backends.
//!
//! Every order-theoretic routine that only needs ordered-field operations is
//! written once against [`Scalar`] and runs either on `f64` (tolerant
//! comparisons) or on [`BigRational`] (exact comparisons).

use std::fmt::Debug;
use std::iter::Sum;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Absolute tolerance used for `f64` order comparisons (partial sums, ties).
pub const TIE_TOL: f64 = 1e-12;

/// An ordered field element usable by the generic order routines.
pub trait Scalar: Clone + Debug + PartialOrd + Signed + Sum + Send + Sync + 'static {
    /// `self <= other`, up to the backend tolerance.
    fn le_tol(&self, other: &Self) -> bool;

    /// `self == other`, up to the backend tolerance.
    fn eq_tol(&self, other: &Self) -> bool {
        self.le_tol(other) && other.le_tol(self)
    }

    /// `self < other` by more than the backend tolerance.
    fn lt_tol(&self, other: &Self) -> bool {
        !other.le_tol(self)
    }

    fn from_rational(r: &BigRational) -> Self;

    fn as_f64(&self) -> f64;

    /// True for exact backends.
    fn is_exact() -> bool;

    /// JSON form: a number for floats, an `"a/b"` string for rationals.
    fn serialize_value<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error>;
}

impl Scalar for f64 {
    fn le_tol(&self, other: &Self) -> bool {
        *self <= *other + TIE_TOL
    }

    fn from_rational(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn as_f64(&self) -> f64 {
        *self
    }

    fn is_exact() -> bool {
        false
    }

    fn serialize_value<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(*self)
    }
}

impl Scalar for BigRational {
    fn le_tol(&self, other: &Self) -> bool {
        self <= other
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_exact() -> bool {
        true
    }

    fn serialize_value<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Shorthand for `a/b` as an exact rational.
pub fn ratio(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// Parses `"a/b"`, `"a"` or a finite decimal such as `"0.25"` exactly.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = BigRational::new(num, den);
    Some(if neg { -r } else { r })
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// computed from the continued-fraction convergents and semiconvergents.
pub fn best_rational(x: f64, max_den: u64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let neg = x < 0.0;
    let x = x.abs();
    // convergents h/k
    let (mut h0, mut h1): (i128, i128) = (0, 1);
    let (mut k0, mut k1): (i128, i128) = (1, 0);
    let mut rem = x;
    let max_den = max_den as i128;
    let mut best = (x.round() as i128, 1i128);
    for _ in 0..64 {
        let a = rem.floor();
        if a > 1e15 {
            break;
        }
        let a = a as i128;
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > max_den {
            // largest admissible semiconvergent
            let t = (max_den - k0) / k1.max(1);
            if t > 0 {
                let hs = t * h1 + h0;
                let ks = t * k1 + k0;
                let err_s = (x - hs as f64 / ks as f64).abs();
                let err_b = (x - best.0 as f64 / best.1 as f64).abs();
                if err_s < err_b {
                    best = (hs, ks);
                }
            }
            break;
        }
        best = (h2, k2);
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = rem - a as f64;
        if frac < 1e-18 {
            break;
        }
        rem = 1.0 / frac;
    }
    let r = BigRational::new(BigInt::from(best.0), BigInt::from(best.1));
    Some(if neg { -r } else { r })
}

/// Least common multiple of the denominators of `values`.
pub fn common_denominator(values: &[BigRational]) -> BigInt {
    values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_and_decimal_forms() {
        assert_eq!(parse_rational("2/3"), Some(ratio(2, 3)));
        assert_eq!(parse_rational(" -4/6 "), Some(ratio(-2, 3)));
        assert_eq!(parse_rational("0.25"), Some(ratio(1, 4)));
        assert_eq!(parse_rational("-1.5"), Some(ratio(-3, 2)));
        assert_eq!(parse_rational("7"), Some(ratio(7, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn best_rational_recovers_small_fractions() {
        assert_eq!(best_rational(2.0 / 3.0, 1024), Some(ratio(2, 3)));
        assert_eq!(best_rational(0.1, 1024), Some(ratio(1, 10)));
        assert_eq!(best_rational(-0.375, 1024), Some(ratio(-3, 8)));
        assert_eq!(best_rational(5.0 / 7.0, 1024), Some(ratio(5, 7)));
        let pi = best_rational(std::f64::consts::PI, 1000).unwrap();
        assert_eq!(pi, ratio(355, 113));
    }

    #[test]
    fn tolerant_and_exact_comparisons() {
        assert!(1.0f64.le_tol(&(1.0 - 1e-13)));
        assert!(!1.0f64.lt_tol(&(1.0 + 1e-13)));
        assert!(ratio(1, 3).lt_tol(&ratio(1, 2)));
        assert!(!ratio(1, 2).le_tol(&ratio(1, 3)));
        assert_eq!(common_denominator(&[ratio(1, 4), ratio(1, 6)]), BigInt::from(12));
    }
}
