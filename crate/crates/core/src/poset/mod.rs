//! Finite preorders and their real-valued representations.

mod catalog;
mod dimension;
mod represent;

pub use catalog::*;
pub use dimension::*;
pub use represent::*;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PosetError {
    #[error("IndexOutOfRange: index {index} with n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("LengthMismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("NonFinite: function {func} at element {index}")]
    NonFinite { func: usize, index: usize },
    #[error("NotAPreorder: relation fails {property}")]
    NotAPreorder { property: &'static str },
    #[error("NotIncreasing: set {set} contains {x} but not {y} although {x} ⪯ {y}")]
    NotIncreasing { set: usize, x: usize, y: usize },
    #[error("NotMonotone: {x} ⪯ {y} but u({x}) > u({y})")]
    NotMonotone { x: usize, y: usize },
    #[error("NotAntisymmetric: {x} and {y} are distinct but equivalent")]
    NotAntisymmetric { x: usize, y: usize },
    #[error("EmptySequence")]
    EmptySequence,
    #[error("EmptySubset")]
    EmptySubset,
    #[error("ScaleExceeded: n = {n} exceeds {max}")]
    ScaleExceeded { n: usize, max: usize },
    #[error("InvalidRealizer")]
    InvalidRealizer,
    #[error("NotARepresentation")]
    NotARepresentation,
    #[error("RadixOutOfRange: r = {r} must lie in (0, 1/2)")]
    RadixOutOfRange { r: f64 },
}

/// A reflexive, transitive relation on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FinitePreorder {
    n: usize,
    leq: Vec<Vec<bool>>,
}

impl FinitePreorder {
    /// Validates an explicit relation matrix.
    pub fn from_matrix(leq: Vec<Vec<bool>>) -> Result<Self, PosetError> {
        let n = leq.len();
        if let Some(row) = leq.iter().find(|r| r.len() != n) {
            return Err(PosetError::LengthMismatch { expected: n, found: row.len() });
        }
        if (0..n).any(|i| !leq[i][i]) {
            return Err(PosetError::NotAPreorder { property: "reflexivity" });
        }
        for i in 0..n {
            for j in 0..n {
                if leq[i][j] && (0..n).any(|k| leq[j][k] && !leq[i][k]) {
                    return Err(PosetError::NotAPreorder { property: "transitivity" });
                }
            }
        }
        Ok(FinitePreorder { n, leq })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x][y]
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        self.leq[x][y] && !self.leq[y][x]
    }

    pub fn equiv(&self, x: usize, y: usize) -> bool {
        self.leq[x][y] && self.leq[y][x]
    }

    pub fn incomparable(&self, x: usize, y: usize) -> bool {
        !self.leq[x][y] && !self.leq[y][x]
    }

    pub fn matrix(&self) -> &[Vec<bool>] {
        &self.leq
    }

    /// Pairs `(x, y)` with `x ⪯ y` and `x != y`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.n {
            for y in 0..self.n {
                if x != y && self.leq[x][y] {
                    out.push((x, y));
                }
            }
        }
        out
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.first_equivalent_pair().is_none()
    }

    pub(crate) fn first_equivalent_pair(&self) -> Option<(usize, usize)> {
        (0..self.n).flat_map(|x| (x + 1..self.n).map(move |y| (x, y))).find(|&(x, y)| self.equiv(x, y))
    }

    pub fn is_total(&self) -> bool {
        (0..self.n).all(|x| (0..self.n).all(|y| !self.incomparable(x, y)))
    }

    /// Restriction to `elements`, re-indexed in the given order.
    pub fn restrict(&self, elements: &[usize]) -> FinitePreorder {
        let leq = elements.iter().map(|&x| elements.iter().map(|&y| self.leq[x][y]).collect()).collect();
        FinitePreorder { n: elements.len(), leq }
    }

    /// Equivalence-class id of each element, numbered by first occurrence.
    pub fn classes(&self) -> Vec<usize> {
        let mut id = vec![usize::MAX; self.n];
        let mut next = 0;
        for x in 0..self.n {
            if id[x] == usize::MAX {
                for y in x..self.n {
                    if self.equiv(x, y) {
                        id[y] = next;
                    }
                }
                next += 1;
            }
        }
        id
    }

    /// Partial order on the equivalence classes, with the class of each element.
    pub fn quotient(&self) -> (FinitePreorder, Vec<usize>) {
        let class = self.classes();
        let reps: Vec<usize> = (0..self.n).filter(|&x| (0..x).all(|y| class[y] != class[x])).collect();
        (self.restrict(&reps), class)
    }

    /// Connected components of the comparability graph.
    pub fn comparability_components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.n];
        let mut next = 0;
        for start in 0..self.n {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = next;
            while let Some(x) = stack.pop() {
                for y in 0..self.n {
                    if comp[y] == usize::MAX && !self.incomparable(x, y) {
                        comp[y] = next;
                        stack.push(y);
                    }
                }
            }
            next += 1;
        }
        comp
    }
}

/// Reflexive-transitive closure of `pairs` on `0..n`.
pub fn from_relation(n: usize, pairs: &[(usize, usize)]) -> Result<FinitePreorder, PosetError> {
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(i, j) in pairs {
        for index in [i, j] {
            if index >= n {
                return Err(PosetError::IndexOutOfRange { index, n });
            }
        }
        leq[i][j] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if leq[i][k] {
                for j in 0..n {
                    if leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
    }
    Ok(FinitePreorder { n, leq })
}

/// Real functions on the elements, one value vector per function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealFamily {
    funcs: Vec<Vec<f64>>,
}

impl RealFamily {
    pub fn new(funcs: Vec<Vec<f64>>) -> Result<Self, PosetError> {
        if let Some(first) = funcs.first() {
            let n = first.len();
            for (func, f) in funcs.iter().enumerate() {
                if f.len() != n {
                    return Err(PosetError::LengthMismatch { expected: n, found: f.len() });
                }
                if let Some(index) = f.iter().position(|v| !v.is_finite()) {
                    return Err(PosetError::NonFinite { func, index });
                }
            }
        }
        Ok(RealFamily { funcs })
    }

    pub fn empty() -> Self {
        RealFamily { funcs: Vec::new() }
    }

    pub fn funcs(&self) -> &[Vec<f64>] {
        &self.funcs
    }

    pub fn len(&self) -> usize {
        self.funcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.funcs.is_empty()
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<(), PosetError> {
        match self.funcs.iter().find(|f| f.len() != n) {
            Some(f) => Err(PosetError::LengthMismatch { expected: n, found: f.len() }),
            None => Ok(()),
        }
    }
}

/// Subsets closed upwards under a fixed preorder.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncreasingSetFamily {
    sets: Vec<Vec<bool>>,
}

impl IncreasingSetFamily {
    pub fn new(p: &FinitePreorder, sets: &[Vec<usize>]) -> Result<Self, PosetError> {
        let mut masks = Vec::with_capacity(sets.len());
        for (set, members) in sets.iter().enumerate() {
            let mut mask = vec![false; p.n()];
            for &x in members {
                if x >= p.n() {
                    return Err(PosetError::IndexOutOfRange { index: x, n: p.n() });
                }
                mask[x] = true;
            }
            for x in 0..p.n() {
                if let Some(y) = (0..p.n()).find(|&y| mask[x] && p.leq(x, y) && !mask[y]) {
                    return Err(PosetError::NotIncreasing { set, x, y });
                }
            }
            masks.push(mask);
        }
        Ok(IncreasingSetFamily { sets: masks })
    }

    /// Principal filters `{y : x ⪯ y}` of every element.
    pub fn principal_filters(p: &FinitePreorder) -> Self {
        let sets = (0..p.n()).map(|x| (0..p.n()).map(|y| p.leq(x, y)).collect()).collect();
        IncreasingSetFamily { sets }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, set: usize, x: usize) -> bool {
        self.sets[set][x]
    }

    /// Some set holds `y` but not `x`.
    pub fn separates(&self, x: usize, y: usize) -> bool {
        self.sets.iter().any(|s| !s[x] && s[y])
    }
}

/// Linear orders listed bottom to top.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Realizer {
    pub extensions: Vec<Vec<usize>>,
}

/// Position of each element in a linear order given bottom to top.
pub fn ranks(order: &[usize]) -> Vec<usize> {
    let mut rank = vec![0; order.len()];
    for (pos, &x) in order.iter().enumerate() {
        rank[x] = pos;
    }
    rank
}

/// Elements of `subset` with nothing strictly above them inside `subset`.
pub fn maximal_elements(p: &FinitePreorder, subset: &[usize]) -> Result<Vec<usize>, PosetError> {
    if subset.is_empty() {
        return Err(PosetError::EmptySubset);
    }
    if let Some(&index) = subset.iter().find(|&&x| x >= p.n()) {
        return Err(PosetError::IndexOutOfRange { index, n: p.n() });
    }
    Ok(subset.iter().copied().filter(|&x| !subset.iter().any(|&y| p.lt(x, y))).collect())
}

/// Every pair with a common upper bound is comparable.
pub fn is_conditionally_connected(p: &FinitePreorder) -> bool {
    let n = p.n();
    (0..n).all(|x| (0..n).all(|y| !p.incomparable(x, y) || !(0..n).any(|z| p.leq(x, z) && p.leq(y, z))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_of_a_chain() {
        let p = from_relation(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(p.leq(0, 2));
        assert!(!p.leq(2, 0));
        assert!(p.is_total());
        let a = from_relation(2, &[]).unwrap();
        assert!(a.incomparable(0, 1));
        assert_eq!(from_relation(2, &[(0, 2)]), Err(PosetError::IndexOutOfRange { index: 2, n: 2 }));
    }

    #[test]
    fn closure_of_the_sign_modulus_generators() {
        // labels: -x, -y, -z, x, y, z
        let gens = [(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)];
        let p = from_relation(6, &gens).unwrap();
        let added: Vec<_> = p.pairs().into_iter().filter(|e| !gens.contains(e)).collect();
        assert_eq!(added, vec![(0, 2), (0, 4), (0, 5), (1, 5), (3, 5)]);
        assert!(p.leq(0, 4) && p.leq(0, 5) && p.leq(1, 5));
        assert_eq!(p, sign_modulus_poset());
    }

    #[test]
    fn from_matrix_rejects_non_preorders() {
        assert!(matches!(
            FinitePreorder::from_matrix(vec![vec![true, true], vec![false, false]]),
            Err(PosetError::NotAPreorder { property: "reflexivity" })
        ));
        let m = vec![vec![true, true, false], vec![false, true, true], vec![false, false, true]];
        assert!(matches!(FinitePreorder::from_matrix(m), Err(PosetError::NotAPreorder { property: "transitivity" })));
    }

    #[test]
    fn maximal_elements_examples() {
        assert_eq!(maximal_elements(&chain(4), &[0, 1, 2, 3]).unwrap(), vec![3]);
        assert_eq!(maximal_elements(&antichain(3), &[0, 1, 2]).unwrap(), vec![0, 1, 2]);
        // {-x, x, -y} -> {x, -y}
        let mut got = maximal_elements(&sign_modulus_poset(), &[0, 3, 1]).unwrap();
        got.sort();
        assert_eq!(got, vec![1, 3]);
        assert_eq!(maximal_elements(&chain(2), &[]), Err(PosetError::EmptySubset));
    }

    #[test]
    fn conditional_connectedness() {
        assert!(is_conditionally_connected(&chain(5)));
        assert!(!is_conditionally_connected(&v_poset()));
        assert!(is_conditionally_connected(&antichain(3)));
    }

    #[test]
    fn classes_and_components() {
        let p = from_relation(4, &[(0, 1), (1, 0), (2, 3)]).unwrap();
        assert_eq!(p.classes(), vec![0, 0, 1, 2]);
        assert_eq!(p.comparability_components(), vec![0, 0, 1, 1]);
        let (q, class) = p.quotient();
        assert_eq!(q.n(), 3);
        assert!(q.is_antisymmetric() && q.lt(1, 2));
        assert_eq!(class, vec![0, 0, 1, 2]);
        assert!(!p.is_antisymmetric());
    }

    #[test]
    fn increasing_sets_are_validated() {
        let p = chain(3);
        assert!(IncreasingSetFamily::new(&p, &[vec![1, 2]]).is_ok());
        assert_eq!(IncreasingSetFamily::new(&p, &[vec![0, 2]]), Err(PosetError::NotIncreasing { set: 0, x: 0, y: 1 }));
    }
}
