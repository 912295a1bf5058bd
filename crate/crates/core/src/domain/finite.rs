//! Finite dcpos: directed subsets, way-below, Scott opens, weak bases and
//! compact elements by exhaustive enumeration.

use serde::Serialize;

use super::DomainError;
use crate::poset::FinitePreorder;

/// Largest carrier handled by the subset enumerations.
pub const DCPO_MAX_N: usize = 12;

/// A finite partial order; every directed subset has a maximum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteDcpo {
    #[serde(skip)]
    order: FinitePreorder,
    n: usize,
}

impl FiniteDcpo {
    pub fn new(order: FinitePreorder) -> Result<Self, DomainError> {
        if !order.is_antisymmetric() {
            return Err(DomainError::NotAntisymmetric);
        }
        if order.n() > DCPO_MAX_N {
            return Err(DomainError::ScaleExceeded { n: order.n(), max: DCPO_MAX_N });
        }
        Ok(FiniteDcpo { n: order.n(), order })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> &FinitePreorder {
        &self.order
    }

    fn leq(&self, x: usize, y: usize) -> bool {
        self.order.leq(x, y)
    }

    fn check(&self, x: usize) -> Result<(), DomainError> {
        if x < self.n {
            Ok(())
        } else {
            Err(DomainError::IndexOutOfRange { index: x, n: self.n })
        }
    }

    fn members(&self, mask: u32) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| mask >> i & 1 == 1)
    }

    fn up_mask(&self, x: usize) -> u32 {
        (0..self.n).filter(|&y| self.leq(x, y)).fold(0, |m, y| m | 1 << y)
    }

    /// Nonempty, and every pair has an upper bound inside the subset.
    fn is_directed(&self, mask: u32) -> bool {
        mask != 0
            && self
                .members(mask)
                .all(|a| self.members(mask).all(|b| self.members(mask).any(|c| self.leq(a, c) && self.leq(b, c))))
    }

    /// Every directed subset with its supremum, which is its maximum.
    pub fn directed_subsets(&self) -> Vec<(u32, usize)> {
        (1u32..1 << self.n)
            .filter(|&m| self.is_directed(m))
            .map(|m| {
                let top = self
                    .members(m)
                    .find(|&t| self.members(m).all(|a| self.leq(a, t)))
                    .expect("a finite directed set has a maximum");
                (m, top)
            })
            .collect()
    }

    fn way_below_with(&self, directed: &[(u32, usize)], x: usize, y: usize) -> bool {
        let up_x = self.up_mask(x);
        directed.iter().all(|&(m, sup)| !self.leq(y, sup) || m & up_x != 0)
    }
}

/// `x ≪ y`: every directed `A` with `y ⪯ ⊔A` meets the up-set of `x`.
pub fn finite_way_below(p: &FiniteDcpo, x: usize, y: usize) -> Result<bool, DomainError> {
    p.check(x)?;
    p.check(y)?;
    Ok(p.way_below_with(&p.directed_subsets(), x, y))
}

/// The full way-below relation, `matrix[x][y] = x ≪ y`.
pub fn way_below_matrix(p: &FiniteDcpo) -> Vec<Vec<bool>> {
    let directed = p.directed_subsets();
    (0..p.n).map(|x| (0..p.n).map(|y| p.way_below_with(&directed, x, y)).collect()).collect()
}

/// Scott-open sets: upper sets inaccessible by directed suprema, ordered by
/// size and then lexicographically.
pub fn scott_opens(p: &FiniteDcpo) -> Vec<Vec<usize>> {
    let directed = p.directed_subsets();
    let mut opens: Vec<Vec<usize>> = (0u32..1 << p.n)
        .filter(|&o| p.members(o).all(|x| p.up_mask(x) & !o == 0))
        .filter(|&o| directed.iter().all(|&(m, sup)| o >> sup & 1 == 0 || m & o != 0))
        .map(|o| p.members(o).collect())
        .collect();
    opens.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    opens
}

/// `x ⪯ y` iff every Scott open containing `x` contains `y`, for all pairs.
pub fn order_from_opens_check(p: &FiniteDcpo) -> bool {
    let opens = scott_opens(p);
    (0..p.n).all(|x| {
        (0..p.n).all(|y| {
            let specialization = opens.iter().all(|o| !o.contains(&x) || o.contains(&y));
            specialization == p.leq(x, y)
        })
    })
}

/// Whether every element is the supremum of a directed subset of `basis`.
/// In a finite dcpo this forces `basis` to be everything, which is asserted.
pub fn weak_basis_check(p: &FiniteDcpo, basis: &[usize]) -> Result<bool, DomainError> {
    let mut mask = 0u32;
    for &b in basis {
        p.check(b)?;
        mask |= 1 << b;
    }
    let directed = p.directed_subsets();
    let reached = (0..p.n).all(|x| directed.iter().any(|&(m, sup)| m & !mask == 0 && sup == x));
    let full = mask.count_ones() as usize == p.n;
    assert_eq!(reached, full, "a weak basis of a finite dcpo is the whole carrier");
    Ok(reached)
}

/// `K(P) = {x : x ≪ x}`.
pub fn compact_elements(p: &FiniteDcpo) -> Vec<usize> {
    let directed = p.directed_subsets();
    (0..p.n).filter(|&x| p.way_below_with(&directed, x, x)).collect()
}
