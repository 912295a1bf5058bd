//! The interval domain over exact rationals and the bisection method.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use super::DomainError;
use crate::scalar::parse_rational;

/// A compact interval `[lo, hi]` with rational ends.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalInterval {
    lo: BigRational,
    hi: BigRational,
}

impl RationalInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self, DomainError> {
        if lo > hi {
            return Err(DomainError::InvalidInterval { lo: lo.to_string(), hi: hi.to_string() });
        }
        Ok(RationalInterval { lo, hi })
    }

    pub fn point(x: BigRational) -> Self {
        RationalInterval { lo: x.clone(), hi: x }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

/// `"a/b,c/d"`.
impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.lo, self.hi)
    }
}

impl FromStr for RationalInterval {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DomainError::InvalidParameter { reason: format!("cannot parse interval {s:?}") };
        let (a, b) = s.trim().trim_start_matches('[').trim_end_matches(']').split_once(',').ok_or_else(bad)?;
        let lo = parse_rational(a.trim()).ok_or_else(bad)?;
        let hi = parse_rational(b.trim()).ok_or_else(bad)?;
        RationalInterval::new(lo, hi)
    }
}

impl Serialize for RationalInterval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Information order: `I ⪯ J` iff `J ⊆ I`.
pub fn interval_leq(i: &RationalInterval, j: &RationalInterval) -> bool {
    i.lo <= j.lo && j.hi <= i.hi
}

/// Supremum of a directed family, the intersection `[max lo, min hi]`.
///
/// With `check_directed` every pair must overlap; otherwise only the
/// overall intersection is checked.
pub fn interval_sup(chain: &[RationalInterval], check_directed: bool) -> Result<RationalInterval, DomainError> {
    let first = chain.first().ok_or_else(|| DomainError::NotDirected { reason: "empty family".into() })?;
    if check_directed {
        for (a, i) in chain.iter().enumerate() {
            for (b, j) in chain.iter().enumerate().skip(a + 1) {
                if i.hi < j.lo || j.hi < i.lo {
                    return Err(DomainError::NotDirected { reason: format!("members {a} and {b} are disjoint") });
                }
            }
        }
    }
    let lo = chain.iter().map(|i| &i.lo).max().unwrap_or(&first.lo).clone();
    let hi = chain.iter().map(|i| &i.hi).min().unwrap_or(&first.hi).clone();
    RationalInterval::new(lo, hi).map_err(|_| DomainError::NotDirected { reason: "empty intersection".into() })
}

/// `I ≪ J` iff `J` lies in the interior of `I`.
pub fn interval_way_below(i: &RationalInterval, j: &RationalInterval) -> bool {
    i.lo < j.lo && j.hi < i.hi
}

/// Some `K` with `I ≪ K ≪ J`, by moving both ends of `J` halfway towards `I`.
pub fn interval_interpolate(i: &RationalInterval, j: &RationalInterval) -> Option<RationalInterval> {
    if !interval_way_below(i, j) {
        return None;
    }
    let two = BigRational::from_integer(2.into());
    let lo = (&i.lo + &j.lo) / &two;
    let hi = (&i.hi + &j.hi) / &two;
    Some(RationalInterval { lo, hi })
}

/// Horner evaluation; coefficients in ascending degree.
pub fn eval_poly(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// Exact bisection trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BisectionRun {
    /// Starting interval followed by one interval per halving.
    pub intervals: Vec<RationalInterval>,
    /// Set when a midpoint was an exact root; the last interval is `[m, m]`.
    pub exact_root: bool,
}

impl BisectionRun {
    pub fn halvings(&self) -> usize {
        self.intervals.len() - 1
    }

    pub fn last(&self) -> &RationalInterval {
        self.intervals.last().expect("at least the starting interval")
    }
}

/// Halves `[q, q']` keeping a sign change of `p` until the width is at most
/// `eps` or a midpoint is a root.
pub fn bisection_run(
    coeffs: &[BigRational],
    q: &BigRational,
    q_prime: &BigRational,
    eps: &BigRational,
) -> Result<BisectionRun, DomainError> {
    if !eps.is_positive() {
        return Err(DomainError::InvalidParameter { reason: format!("eps must be positive, got {eps}") });
    }
    let (mut lo, mut hi) = if q <= q_prime { (q.clone(), q_prime.clone()) } else { (q_prime.clone(), q.clone()) };
    let mut p_lo = eval_poly(coeffs, &lo);
    let p_hi = eval_poly(coeffs, &hi);
    if !(&p_lo * &p_hi).is_negative() {
        return Err(DomainError::NoSignChange { lo: lo.to_string(), hi: hi.to_string() });
    }
    let two = BigRational::from_integer(2.into());
    let mut intervals = vec![RationalInterval { lo: lo.clone(), hi: hi.clone() }];
    while &hi - &lo > *eps {
        let mid = (&lo + &hi) / &two;
        let p_mid = eval_poly(coeffs, &mid);
        if p_mid.is_zero() {
            intervals.push(RationalInterval::point(mid));
            return Ok(BisectionRun { intervals, exact_root: true });
        }
        if (&p_lo * &p_mid).is_negative() {
            hi = mid;
        } else {
            lo = mid;
            p_lo = p_mid;
        }
        intervals.push(RationalInterval { lo: lo.clone(), hi: hi.clone() });
    }
    Ok(BisectionRun { intervals, exact_root: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_bigint::BigInt;
    use num_traits::One;
    use proptest::prelude::*;

    fn iv(a: (i64, i64), b: (i64, i64)) -> RationalInterval {
        RationalInterval::new(ratio(a.0, a.1), ratio(b.0, b.1)).unwrap()
    }

    fn ints(cs: &[i64]) -> Vec<BigRational> {
        cs.iter().map(|&c| ratio(c, 1)).collect()
    }

    fn dyadic(k: u32) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(2).pow(k))
    }

    #[test]
    fn order_examples() {
        assert!(interval_leq(&iv((0, 1), (1, 1)), &iv((1, 4), (1, 2))));
        assert!(!interval_leq(&iv((0, 1), (1, 1)), &iv((1, 2), (2, 1))));
        let i = iv((0, 1), (1, 1));
        assert!(interval_leq(&i, &i));
        assert!(RationalInterval::new(ratio(1, 1), ratio(0, 1)).is_err());
        assert_eq!("1/4,1/2".parse::<RationalInterval>().unwrap(), iv((1, 4), (1, 2)));
        assert_eq!(iv((1, 4), (1, 2)).to_string(), "1/4,1/2");
    }

    #[test]
    fn sup_examples() {
        let chain = [iv((1, 1), (2, 1)), iv((1, 1), (3, 2)), iv((5, 4), (3, 2))];
        assert_eq!(interval_sup(&chain, true).unwrap(), iv((5, 4), (3, 2)));
        assert!(matches!(
            interval_sup(&[iv((0, 1), (1, 1)), iv((2, 1), (3, 1))], true),
            Err(DomainError::NotDirected { .. })
        ));
        assert!(matches!(
            interval_sup(&[iv((0, 1), (1, 1)), iv((2, 1), (3, 1))], false),
            Err(DomainError::NotDirected { .. })
        ));
        assert_eq!(interval_sup(&chain[..1], true).unwrap(), chain[0]);
    }

    #[test]
    fn way_below_examples() {
        assert!(interval_way_below(&iv((0, 1), (1, 1)), &iv((1, 4), (1, 2))));
        let i = iv((0, 1), (1, 1));
        assert!(!interval_way_below(&i, &i));
        assert!(!interval_way_below(&i, &iv((0, 1), (1, 2))));
    }

    /// Refutation oracle from the definition: the chain
    /// `K_n = [lo_J - 2^-n, hi_J + 2^-n]` has supremum `J`, so `I ≪ J`
    /// needs some `K_n` above `I`. Ends with denominators below 2^20 make
    /// 64 terms decisive.
    fn approach_oracle(i: &RationalInterval, j: &RationalInterval) -> bool {
        (0..64).any(|n| {
            let k = RationalInterval { lo: &j.lo - dyadic(n), hi: &j.hi + dyadic(n) };
            interval_leq(i, &k)
        })
    }

    fn small_interval() -> impl Strategy<Value = RationalInterval> {
        (-40i64..40, -40i64..40, 1i64..9).prop_map(|(a, b, d)| {
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            RationalInterval::new(ratio(a, d), ratio(b, d)).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn way_below_matches_definition(i in small_interval(), j in small_interval()) {
            prop_assert_eq!(interval_way_below(&i, &j), approach_oracle(&i, &j));
            if interval_way_below(&i, &j) {
                prop_assert!(interval_leq(&i, &j));
                let k = interval_interpolate(&i, &j).unwrap();
                prop_assert!(interval_way_below(&i, &k) && interval_way_below(&k, &j));
            }
        }

        #[test]
        fn bisection_brackets_rational_roots(r in -20i64..20, d in 1i64..7, lo_off in 1i64..9, hi_off in 1i64..9) {
            // p(x) = d x - r has the single root r / d
            let root = ratio(r, d);
            let coeffs = vec![ratio(-r, 1), ratio(d, 1)];
            let q = &root - ratio(lo_off, 3);
            let q2 = &root + ratio(hi_off, 5);
            let run = bisection_run(&coeffs, &q, &q2, &dyadic(12)).unwrap();
            let w0 = run.intervals[0].width();
            for (k, pair) in run.intervals.windows(2).enumerate() {
                prop_assert!(interval_leq(&pair[0], &pair[1]));
                if !(run.exact_root && k + 2 == run.intervals.len()) {
                    prop_assert_eq!(pair[1].width(), &w0 * dyadic(k as u32 + 1));
                }
            }
            prop_assert!(run.intervals.iter().all(|i| i.contains(&root)));
        }
    }

    #[test]
    fn sqrt_two_by_bisection() {
        let p = ints(&[-2, 0, 1]);
        for k in [10u32, 20] {
            let run = bisection_run(&p, &ratio(1, 1), &ratio(2, 1), &dyadic(k)).unwrap();
            assert_eq!(run.halvings(), k as usize);
            assert!(!run.exact_root);
            let last = run.last();
            assert_eq!(last.width(), dyadic(k));
            assert!(eval_poly(&p, last.lo()).is_negative() && eval_poly(&p, last.hi()).is_positive());
            for (step, i) in run.intervals.iter().enumerate() {
                assert_eq!(i.width(), dyadic(step as u32));
            }
        }
    }

    #[test]
    fn bisection_edge_cases() {
        let run = bisection_run(&[ratio(-1, 2), ratio(1, 1)], &ratio(0, 1), &ratio(1, 1), &dyadic(10)).unwrap();
        assert!(run.exact_root);
        assert_eq!(run.last(), &RationalInterval::point(ratio(1, 2)));
        assert_eq!(run.halvings(), 1);
        assert!(matches!(
            bisection_run(&ints(&[1, 0, 1]), &ratio(0, 1), &ratio(1, 1), &dyadic(4)),
            Err(DomainError::NoSignChange { .. })
        ));
        assert!(bisection_run(&ints(&[-2, 0, 1]), &ratio(1, 1), &ratio(2, 1), &ratio(0, 1)).is_err());
    }
}
