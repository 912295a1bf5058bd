//! Desk-scale domain theory: the interval domain and bisection, the Cantor
//! domain, finite dcpos with their Scott topology, and Cantor pairing.

mod cantor;
mod finite;
mod interval;

pub use cantor::*;
pub use finite::*;
pub use interval::*;

use num_integer::Roots;
use thiserror::Error;

use crate::poset::PosetError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("InvalidInterval: lower end {lo} exceeds upper end {hi}")]
    InvalidInterval { lo: String, hi: String },
    #[error("NotDirected: {reason}")]
    NotDirected { reason: String },
    #[error("NoSignChange: p({lo}) and p({hi}) do not have opposite signs")]
    NoSignChange { lo: String, hi: String },
    #[error("InvalidParameter: {reason}")]
    InvalidParameter { reason: String },
    #[error("AlphabetMismatch: alphabets of size {left} and {right}")]
    AlphabetMismatch { left: usize, right: usize },
    #[error("InvalidWord: {reason}")]
    InvalidWord { reason: String },
    #[error("NotAntisymmetric: a dcpo needs a partial order")]
    NotAntisymmetric,
    #[error("ScaleExceeded: {n} elements, limit {max}")]
    ScaleExceeded { n: usize, max: usize },
    #[error("IndexOutOfRange: {index} with {n} elements")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("Overflow: pairing result does not fit in 64 bits")]
    Overflow,
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// `⟨n, m⟩ = (n + m)(n + m + 1) / 2 + n`.
pub fn cantor_pair(n: u64, m: u64) -> Result<u64, DomainError> {
    let s = n.checked_add(m).ok_or(DomainError::Overflow)?;
    let tri = if s % 2 == 0 { (s / 2).checked_mul(s + 1) } else { s.checked_mul(s.div_ceil(2)) };
    tri.and_then(|t| t.checked_add(n)).ok_or(DomainError::Overflow)
}

/// Inverse of [`cantor_pair`].
pub fn cantor_unpair(k: u64) -> (u64, u64) {
    let k = k as u128;
    let mut w = ((8 * k + 1).sqrt() - 1) / 2;
    while w * (w + 1) / 2 > k {
        w -= 1;
    }
    let n = k - w * (w + 1) / 2;
    (n as u64, (w - n) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn pairing_examples() {
        assert_eq!(cantor_pair(0, 0).unwrap(), 0);
        assert_eq!(cantor_pair(1, 0).unwrap(), 2);
        assert_eq!(cantor_pair(0, 1).unwrap(), 1);
        assert_eq!(cantor_unpair(2), (1, 0));
        assert_eq!(cantor_pair(u64::MAX, 1), Err(DomainError::Overflow));
    }

    #[test]
    fn pairing_round_trip() {
        let mut seen = HashSet::new();
        for n in 0..=500 {
            for m in 0..=500 {
                let k = cantor_pair(n, m).unwrap();
                assert_eq!(2 * k, n * n + 2 * n * m + m * m + 3 * n + m);
                assert_eq!(cantor_unpair(k), (n, m));
                assert!(seen.insert(k));
            }
        }
        // a bijection onto an initial segment for each diagonal
        assert!((0..1000).all(|k| seen.contains(&k)));
        let big = cantor_pair(3_000_000_000, 1_000_000_000).unwrap();
        assert_eq!(cantor_unpair(big), (3_000_000_000, 1_000_000_000));
    }
}
