//! Finite probability distributions and score vectors.

use num_rational::BigRational;
use thiserror::Error;

use crate::scalar::{best_rational, Scalar};

/// Accepted deviation of the entry sum from 1 for user-supplied floats.
pub const PARSE_NORM_TOL: f64 = 1e-9;
/// Deviation allowed after construction (floats are renormalised).
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("EmptyDistribution: a distribution needs at least one outcome")]
    Empty,
    #[error("NegativeEntry: entry {index} is {value}")]
    NegativeEntry { index: usize, value: f64 },
    #[error("NotNormalized: entries sum to {sum}")]
    NotNormalized { sum: f64 },
    #[error("NonFiniteScore: score {index} is {value}")]
    NonFiniteScore { index: usize, value: f64 },
    #[error("LengthMismatch: {left} vs {right} outcomes")]
    LengthMismatch { left: usize, right: usize },
    #[error(
        "IrrationalReference: entry {index} ({value}) has no rational approximation with denominator <= {max_den}"
    )]
    IrrationalReference { index: usize, value: f64, max_den: u64 },
}

/// A probability vector over `n >= 1` outcomes.
///
/// Immutable after construction. With `T = f64` the entries sum to one within
/// [`NORM_TOL`]; with `T = BigRational` they sum to exactly one.
#[derive(Debug, Clone, PartialEq)]
pub struct Dist<T: Scalar = f64> {
    probs: Vec<T>,
}

impl<T: Scalar> serde::Serialize for Dist<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        struct Entry<'a, T>(&'a T);
        impl<T: Scalar> serde::Serialize for Entry<'_, T> {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                self.0.serialize_value(s)
            }
        }
        let mut seq = s.serialize_seq(Some(self.probs.len()))?;
        for v in &self.probs {
            seq.serialize_element(&Entry(v))?;
        }
        seq.end()
    }
}

/// A distribution with exact rational entries.
pub type ExactDist = Dist<BigRational>;

impl<T: Scalar> Dist<T> {
    /// Validates and (for floats) renormalises `raw`.
    pub fn new(raw: Vec<T>) -> Result<Self, DistError> {
        if raw.is_empty() {
            return Err(DistError::Empty);
        }
        for (index, v) in raw.iter().enumerate() {
            if *v < T::zero() || !v.as_f64().is_finite() {
                return Err(DistError::NegativeEntry { index, value: v.as_f64() });
            }
        }
        let sum: T = raw.iter().cloned().sum();
        if T::is_exact() {
            if !sum.is_one() {
                return Err(DistError::NotNormalized { sum: sum.as_f64() });
            }
            return Ok(Self { probs: raw });
        }
        let s = sum.as_f64();
        if (s - 1.0).abs() > PARSE_NORM_TOL {
            return Err(DistError::NotNormalized { sum: s });
        }
        let probs = raw.into_iter().map(|v| v / sum.clone()).collect();
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform distribution over an empty set");
        let one = T::one();
        let size: T = (0..n).map(|_| T::one()).sum();
        Self { probs: vec![one / size; n] }
    }

    pub fn point_mass(n: usize, at: usize) -> Self {
        assert!(at < n);
        let mut probs = vec![T::zero(); n];
        probs[at] = T::one();
        Self { probs }
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn into_vec(self) -> Vec<T> {
        self.probs
    }

    /// Non-increasing rearrangement.
    pub fn sorted_desc(&self) -> Self {
        let mut probs = self.probs.clone();
        probs.sort_by(|a, b| b.partial_cmp(a).expect("finite entries"));
        Self { probs }
    }

    /// Sums of the `i` largest entries, `i = 1..n-1`.
    pub fn top_sums(&self) -> Vec<T> {
        let sorted = self.sorted_desc();
        let mut acc = T::zero();
        sorted.probs[..self.len() - 1]
            .iter()
            .map(|p| {
                acc = acc.clone() + p.clone();
                acc.clone()
            })
            .collect()
    }

    /// `u_i(p)`: minus the sum of the `i` largest entries, `i = 1..n-1`.
    pub fn partial_sum_utilities(&self) -> Vec<T> {
        self.top_sums().into_iter().map(|s| -s).collect()
    }

    pub fn to_f64(&self) -> Dist<f64> {
        Dist { probs: self.probs.iter().map(Scalar::as_f64).collect() }
    }

    /// Applies a permutation given as `perm[new_index] = old_index`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.len());
        Self { probs: perm.iter().map(|&i| self.probs[i].clone()).collect() }
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.probs.iter().all(|p| *p > T::zero())
    }

    pub(crate) fn from_raw_unchecked(probs: Vec<T>) -> Self {
        Self { probs }
    }
}

impl Dist<f64> {
    /// Snaps every entry to the nearest rational with denominator at most
    /// `max_den`; fails when an entry is more than `1e-9` away from it.
    pub fn snap_rational(&self, max_den: u64) -> Result<ExactDist, DistError> {
        let mut out = Vec::with_capacity(self.len());
        for (index, &v) in self.probs.iter().enumerate() {
            let r = best_rational(v, max_den)
                .filter(|r| (Scalar::as_f64(r) - v).abs() <= PARSE_NORM_TOL)
                .ok_or(DistError::IrrationalReference { index, value: v, max_den })?;
            out.push(r);
        }
        Dist::new(out)
    }
}

impl ExactDist {
    pub fn from_ratios(pairs: &[(i64, i64)]) -> Result<Self, DistError> {
        Dist::new(pairs.iter().map(|&(a, b)| crate::scalar::ratio(a, b)).collect())
    }
}

/// Convenience constructor for float distributions.
pub fn new_dist(raw: &[f64]) -> Result<Dist, DistError> {
    Dist::new(raw.to_vec())
}

/// Shannon entropy in nats, with `0 log 0 = 0`.
pub fn shannon_entropy<T: Scalar>(p: &Dist<T>) -> f64 {
    p.probs().iter().map(Scalar::as_f64).filter(|&x| x > 0.0).map(|x| -x * x.ln()).sum()
}

/// One real value per outcome (a utility `U` or an energy `E`).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector(Vec<f64>);

impl ScoreVector {
    pub fn new(values: Vec<f64>) -> Result<Self, DistError> {
        if values.is_empty() {
            return Err(DistError::Empty);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(DistError::NonFiniteScore { index, value });
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|v| -v).collect())
    }

    /// `E_p[self]`.
    pub fn expectation(&self, p: &Dist) -> f64 {
        self.0.iter().zip(p.probs()).map(|(u, q)| u * q).sum()
    }
}

/// `p*(x) = exp(beta U(x)) / sum_y exp(beta U(y))`, max-shifted.
pub fn boltzmann(u: &ScoreVector, beta: f64) -> Result<Dist, DistError> {
    if !beta.is_finite() {
        return Err(DistError::NonFiniteScore { index: usize::MAX, value: beta });
    }
    let scaled: Vec<f64> = u.values().iter().map(|v| beta * v).collect();
    let top = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = scaled.iter().map(|s| (s - top).exp()).collect();
    let z: f64 = weights.iter().sum();
    Ok(Dist::from_raw_unchecked(weights.into_iter().map(|w| w / z).collect()))
}

/// Uniform distribution over the outcomes flagged in `support`.
pub(crate) fn uniform_on(support: &[bool]) -> Dist {
    let k = support.iter().filter(|&&s| s).count() as f64;
    Dist::from_raw_unchecked(support.iter().map(|&s| if s { 1.0 / k } else { 0.0 }).collect())
}
