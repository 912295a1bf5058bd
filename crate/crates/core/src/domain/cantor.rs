//! The Cantor domain of finite and eventually periodic words under the
//! prefix order.

use std::fmt;

use serde::{Serialize, Serializer};

use super::DomainError;
use crate::poset::FinitePreorder;

/// A finite word, or `symbols · period^ω` when `period` is present.
///
/// Periodic words are kept in a canonical form (primitive period, shortest
/// prefix), so structural equality is equality of infinite words.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CantorWord {
    alphabet: usize,
    symbols: Vec<u8>,
    period: Option<Vec<u8>>,
}

impl CantorWord {
    pub fn finite(alphabet: usize, symbols: Vec<u8>) -> Result<Self, DomainError> {
        Self::new(alphabet, symbols, None)
    }

    pub fn new(alphabet: usize, symbols: Vec<u8>, period: Option<Vec<u8>>) -> Result<Self, DomainError> {
        if alphabet == 0 || alphabet > 10 {
            return Err(DomainError::InvalidWord { reason: format!("alphabet size {alphabet} outside 1..=10") });
        }
        let all = symbols.iter().chain(period.iter().flatten());
        if let Some(s) = all.clone().find(|&&s| s as usize >= alphabet) {
            return Err(DomainError::InvalidWord { reason: format!("symbol {s} outside alphabet of size {alphabet}") });
        }
        if period.as_ref().is_some_and(Vec::is_empty) {
            return Err(DomainError::InvalidWord { reason: "empty period".into() });
        }
        let mut w = CantorWord { alphabet, symbols, period };
        w.canonicalize();
        Ok(w)
    }

    /// Parses `"01"`, `"01(10)"` or `"01(10)^ω"` (also `^w`) over digits.
    pub fn parse(s: &str, alphabet: usize) -> Result<Self, DomainError> {
        let bad = || DomainError::InvalidWord { reason: format!("cannot parse {s:?}") };
        let digits = |t: &str| -> Result<Vec<u8>, DomainError> {
            t.chars().map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(bad)).collect()
        };
        let body = s.trim().trim_end_matches("^ω").trim_end_matches("^w");
        match body.split_once('(') {
            None => Self::new(alphabet, digits(body)?, None),
            Some((prefix, rest)) => {
                let period = rest.strip_suffix(')').ok_or_else(bad)?;
                Self::new(alphabet, digits(prefix)?, Some(digits(period)?))
            }
        }
    }

    fn canonicalize(&mut self) {
        let Some(period) = self.period.as_mut() else { return };
        let len = period.len();
        if let Some(d) = (1..=len).find(|&d| len % d == 0 && (0..len).all(|i| period[i] == period[i % d])) {
            period.truncate(d);
        }
        while let (Some(&last), Some(&tail)) = (self.symbols.last(), period.last()) {
            if last != tail {
                break;
            }
            self.symbols.pop();
            period.rotate_right(1);
        }
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    /// Length, `None` for infinite words.
    pub fn len(&self) -> Option<usize> {
        match self.period {
            Some(_) => None,
            None => Some(self.symbols.len()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_none()
    }

    /// Symbol at position `i`, if the word is that long.
    pub fn symbol(&self, i: usize) -> Option<u8> {
        match (&self.period, self.symbols.get(i)) {
            (_, Some(&s)) => Some(s),
            (Some(p), None) => Some(p[(i - self.symbols.len()) % p.len()]),
            (None, None) => None,
        }
    }

    /// First `k` symbols, or the whole word if shorter.
    pub fn prefix(&self, k: usize) -> CantorWord {
        let symbols = (0..k).map_while(|i| self.symbol(i)).collect();
        CantorWord { alphabet: self.alphabet, symbols, period: None }
    }
}

impl fmt::Display for CantorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{s}")?;
        }
        if let Some(p) = &self.period {
            write!(f, "(")?;
            for s in p {
                write!(f, "{s}")?;
            }
            write!(f, ")^ω")?;
        }
        Ok(())
    }
}

impl Serialize for CantorWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn same_alphabet(x: &CantorWord, y: &CantorWord) -> Result<(), DomainError> {
    if x.alphabet == y.alphabet {
        Ok(())
    } else {
        Err(DomainError::AlphabetMismatch { left: x.alphabet, right: y.alphabet })
    }
}

/// Prefix order.
pub fn cantor_leq(x: &CantorWord, y: &CantorWord) -> Result<bool, DomainError> {
    same_alphabet(x, y)?;
    Ok(match (x.len(), y.len()) {
        (None, None) => x == y,
        (None, Some(_)) => false,
        (Some(k), _) => (0..k).all(|i| y.symbol(i).is_some_and(|s| Some(s) == x.symbol(i))),
    })
}

/// Least upper bound of a directed (pairwise prefix-comparable) family.
pub fn cantor_sup(words: &[CantorWord]) -> Result<CantorWord, DomainError> {
    let mut top = words.first().ok_or_else(|| DomainError::NotDirected { reason: "empty family".into() })?;
    for w in &words[1..] {
        if cantor_leq(top, w)? {
            top = w;
        } else if !cantor_leq(w, top)? {
            return Err(DomainError::NotDirected { reason: format!("{top} and {w} are incomparable") });
        }
    }
    // comparability with the running maximum is not transitive; recheck
    for w in words {
        if !cantor_leq(w, top)? {
            return Err(DomainError::NotDirected { reason: format!("{w} is not below {top}") });
        }
    }
    Ok(top.clone())
}

/// `x ≪ y` iff `x` is finite and a prefix of `y`.
pub fn cantor_way_below(x: &CantorWord, y: &CantorWord) -> Result<bool, DomainError> {
    Ok(x.is_finite() && cantor_leq(x, y)?)
}

/// All words of length at most `k` over the alphabet, shortest first and
/// lexicographic within a length, with their prefix order.
pub fn cantor_truncation(alphabet: usize, k: usize) -> Result<(FinitePreorder, Vec<CantorWord>), DomainError> {
    let mut words = vec![CantorWord::finite(alphabet, vec![])?];
    let mut layer = words.clone();
    for _ in 0..k {
        layer = layer
            .iter()
            .flat_map(|w| {
                (0..alphabet as u8).map(move |s| {
                    let mut v = w.symbols.clone();
                    v.push(s);
                    CantorWord { alphabet, symbols: v, period: None }
                })
            })
            .collect();
        words.extend(layer.iter().cloned());
    }
    let leq = words.iter().map(|x| words.iter().map(|y| cantor_leq(x, y).unwrap_or(false)).collect()).collect();
    Ok((FinitePreorder::from_matrix(leq)?, words))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::is_conditionally_connected;
    use proptest::prelude::*;

    fn w(s: &str) -> CantorWord {
        CantorWord::parse(s, 2).unwrap()
    }

    #[test]
    fn parse_and_canonical_form() {
        assert_eq!(w("0(10)"), w("(01)^ω"));
        assert_eq!(w("(0101)^w"), w("(01)"));
        assert_eq!(w("0(10)").to_string(), "(01)^ω");
        assert_eq!(w("01(10)").to_string(), "01(10)^ω");
        assert_eq!(w("0110").to_string(), "0110");
        assert!(CantorWord::parse("012", 2).is_err());
        assert!(CantorWord::parse("0()", 2).is_err());
        assert_eq!(w("1(0)").symbol(5), Some(0));
        assert_eq!(w("").len(), Some(0));
    }

    #[test]
    fn leq_examples() {
        assert!(cantor_leq(&w("01"), &w("0110")).unwrap());
        assert!(!cantor_leq(&w("01"), &w("00")).unwrap());
        assert!(cantor_leq(&w("01"), &w("01(10)")).unwrap());
        assert!(!cantor_leq(&w("(01)"), &w("0101")).unwrap());
        let ternary = CantorWord::parse("01", 3).unwrap();
        assert_eq!(cantor_leq(&w("01"), &ternary), Err(DomainError::AlphabetMismatch { left: 2, right: 3 }));
    }

    #[test]
    fn sup_examples() {
        assert_eq!(cantor_sup(&[w("0"), w("01"), w("011")]).unwrap(), w("011"));
        assert!(matches!(cantor_sup(&[w("0"), w("1")]), Err(DomainError::NotDirected { .. })));
        let omega = w("(01)");
        let mut family: Vec<CantorWord> = (0..=6).map(|k| omega.prefix(k)).collect();
        family.push(omega.clone());
        assert_eq!(cantor_sup(&family).unwrap(), omega);
        // each member comparable with the running maximum but not with each other
        assert!(cantor_sup(&[w("0"), w("00"), w("01")]).is_err());
    }

    #[test]
    fn way_below_examples() {
        let omega = w("(01)");
        assert!(cantor_way_below(&w("01"), &omega).unwrap());
        assert!(!cantor_way_below(&omega, &omega).unwrap());
        for y in ["", "1", "0110", "1(0)"] {
            assert!(cantor_way_below(&w(""), &w(y)).unwrap());
        }
        // the chain of finite prefixes has supremum ω but never reaches it
        let chain: Vec<CantorWord> = (0..50).map(|k| omega.prefix(k)).collect();
        assert!(chain.iter().all(|c| !cantor_leq(&omega, c).unwrap()));
    }

    #[test]
    fn truncation_is_a_conditionally_connected_tree() {
        let (p, words) = cantor_truncation(2, 3).unwrap();
        assert_eq!(words.len(), 15);
        assert!(p.is_antisymmetric());
        assert!(is_conditionally_connected(&p));
    }

    fn finite_word() -> impl Strategy<Value = CantorWord> {
        prop::collection::vec(0u8..2, 0..6).prop_map(|v| CantorWord::finite(2, v).unwrap())
    }

    proptest! {
        #[test]
        fn prefix_order_is_a_partial_order(x in finite_word(), y in finite_word(), z in finite_word()) {
            prop_assert!(cantor_leq(&x, &x).unwrap());
            if cantor_leq(&x, &y).unwrap() && cantor_leq(&y, &x).unwrap() {
                prop_assert_eq!(&x, &y);
            }
            if cantor_leq(&x, &y).unwrap() && cantor_leq(&y, &z).unwrap() {
                prop_assert!(cantor_leq(&x, &z).unwrap());
            }
        }
    }
}
