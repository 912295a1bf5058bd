//! Linear extensions, realizers and Dushnik–Miller dimension.

use rayon::prelude::*;
use serde::Serialize;

use super::{ranks, FinitePreorder, PosetError, RealFamily, Realizer};
use crate::scalar::Scalar;

/// Largest `n` accepted by [`dm_dimension`].
pub const DIMENSION_MAX_N: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Dimension {
    Known {
        dim: usize,
        realizer: Realizer,
    },
    /// No realizer with at most `max_k` members.
    Unknown {
        max_k: usize,
    },
}

fn require_partial_order(p: &FinitePreorder) -> Result<(), PosetError> {
    match p.first_equivalent_pair() {
        Some((x, y)) => Err(PosetError::NotAntisymmetric { x, y }),
        None => Ok(()),
    }
}

/// Topological order of `p` plus the extra `before[x][y]` constraints, taking
/// the smallest available element by `key`; `None` on a cycle.
fn constrained_sort(
    p: &FinitePreorder,
    before: Option<&[Vec<bool>]>,
    key: impl Fn(usize, usize) -> std::cmp::Ordering,
) -> Option<Vec<usize>> {
    let n = p.n();
    let edge = |x: usize, y: usize| x != y && (p.leq(x, y) || before.is_some_and(|b| b[x][y]));
    let mut indeg: Vec<usize> = (0..n).map(|y| (0..n).filter(|&x| edge(x, y)).count()).collect();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let next = (0..n).filter(|&x| !placed[x] && indeg[x] == 0).min_by(|&a, &b| key(a, b))?;
        placed[next] = true;
        order.push(next);
        for y in 0..n {
            if edge(next, y) {
                indeg[y] -= 1;
            }
        }
    }
    Some(order)
}

/// Linear extension of a partial order that puts `x` before `y` whenever
/// they are incomparable and `u(x) < u(y)`; remaining ties go by index.
pub fn linear_extension_by_monotone(p: &FinitePreorder, u: &[f64]) -> Result<Vec<usize>, PosetError> {
    if u.len() != p.n() {
        return Err(PosetError::LengthMismatch { expected: p.n(), found: u.len() });
    }
    require_partial_order(p)?;
    let n = p.n();
    for x in 0..n {
        if let Some(y) = (0..n).find(|&y| p.leq(x, y) && !u[x].le_tol(&u[y])) {
            return Err(PosetError::NotMonotone { x, y });
        }
    }
    let key = |a: usize, b: usize| {
        if u[a].eq_tol(&u[b]) {
            a.cmp(&b)
        } else {
            u[a].total_cmp(&u[b])
        }
    };
    Ok(constrained_sort(p, None, key).expect("a partial order has no cycles"))
}

/// Pairs that belong to every relation from some position to the end and,
/// once present, never drop out again.
pub fn limit_of_relations(seq: &[Vec<Vec<bool>>]) -> Result<Vec<Vec<bool>>, PosetError> {
    let last = seq.last().ok_or(PosetError::EmptySequence)?;
    let n = last.len();
    for rel in seq {
        if let Some(found) = std::iter::once(rel.len()).chain(rel.iter().map(Vec::len)).find(|&len| len != n) {
            return Err(PosetError::LengthMismatch { expected: n, found });
        }
    }
    let mut out = vec![vec![false; n]; n];
    for (x, row) in out.iter_mut().enumerate() {
        for (y, cell) in row.iter_mut().enumerate() {
            let member: Vec<bool> = seq.iter().map(|r| r[x][y]).collect();
            let entered = member.iter().position(|&m| m);
            *cell = entered.is_some_and(|k| member[k..].iter().all(|&m| m));
        }
    }
    Ok(out)
}

fn is_permutation(order: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    order.len() == n && order.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
}

/// `order` lists every element once, respecting `p`.
pub fn is_linear_extension(p: &FinitePreorder, order: &[usize]) -> bool {
    if !is_permutation(order, p.n()) {
        return false;
    }
    let rank = ranks(order);
    p.pairs().into_iter().all(|(x, y)| rank[x] < rank[y])
}

/// Every member extends `p` and their intersection is exactly `p`.
pub fn realizer_is_valid(p: &FinitePreorder, r: &Realizer) -> bool {
    let n = p.n();
    if !p.is_antisymmetric() || r.extensions.is_empty() || !r.extensions.iter().all(|o| is_permutation(o, n)) {
        return false;
    }
    let rank: Vec<Vec<usize>> = r.extensions.iter().map(|o| ranks(o)).collect();
    (0..n).all(|x| {
        (0..n).all(|y| {
            let in_all = rank.iter().all(|rk| rk[x] <= rk[y]);
            p.leq(x, y) == in_all
        })
    })
}

/// One rank function per member of a valid realizer.
pub fn multi_utility_from_realizer(p: &FinitePreorder, r: &Realizer) -> Result<RealFamily, PosetError> {
    if !realizer_is_valid(p, r) {
        return Err(PosetError::InvalidRealizer);
    }
    RealFamily::new(r.extensions.iter().map(|o| ranks(o).into_iter().map(|k| k as f64).collect()).collect())
}

/// All linear extensions in lexicographic order.
pub fn linear_extensions(p: &FinitePreorder) -> Result<Vec<Vec<usize>>, PosetError> {
    let table = ExtensionTable::build(p)?;
    Ok((0..table.len()).map(|i| table.order(i)).collect())
}

/// Rank vectors of every linear extension, stored flat (`n <= 255`).
struct ExtensionTable {
    n: usize,
    ranks: Vec<u8>,
}

impl ExtensionTable {
    fn build(p: &FinitePreorder) -> Result<Self, PosetError> {
        require_partial_order(p)?;
        let n = p.n();
        let mut table = ExtensionTable { n, ranks: Vec::new() };
        let mut prefix = Vec::with_capacity(n);
        let mut placed = vec![false; n];
        table.extend(p, &mut prefix, &mut placed);
        Ok(table)
    }

    fn extend(&mut self, p: &FinitePreorder, prefix: &mut Vec<usize>, placed: &mut [bool]) {
        let n = self.n;
        if prefix.len() == n {
            let start = self.ranks.len();
            self.ranks.resize(start + n, 0);
            for (pos, &x) in prefix.iter().enumerate() {
                self.ranks[start + x] = pos as u8;
            }
            return;
        }
        for x in 0..n {
            if !placed[x] && (0..n).all(|y| y == x || placed[y] || !p.leq(y, x)) {
                placed[x] = true;
                prefix.push(x);
                self.extend(p, prefix, placed);
                prefix.pop();
                placed[x] = false;
            }
        }
    }

    fn len(&self) -> usize {
        self.ranks.len().checked_div(self.n).unwrap_or(1)
    }

    fn rank(&self, i: usize) -> &[u8] {
        &self.ranks[i * self.n..(i + 1) * self.n]
    }

    fn order(&self, i: usize) -> Vec<usize> {
        let mut order = vec![0; self.n];
        for (x, &pos) in self.rank(i).iter().enumerate() {
            order[pos as usize] = x;
        }
        order
    }
}

/// Smallest realizer with at most `max_k` members, preorders first collapsed
/// to their quotient.
///
/// Searches sets of lexicographically enumerated extensions; the last member
/// is forced by the incomparable pairs still lacking a reversal, so it is
/// found by one constrained topological sort. Root branches run in parallel
/// and the first success in enumeration order wins.
pub fn dm_dimension(p: &FinitePreorder, max_k: usize) -> Result<Dimension, PosetError> {
    if p.n() > DIMENSION_MAX_N {
        return Err(PosetError::ScaleExceeded { n: p.n(), max: DIMENSION_MAX_N });
    }
    let (q, _) = p.quotient();
    let n = q.n();
    let realize = |extensions: Vec<Vec<usize>>, dim: usize| Dimension::Known { dim, realizer: Realizer { extensions } };
    if max_k == 0 {
        return Ok(Dimension::Unknown { max_k });
    }
    if q.is_total() {
        let order = constrained_sort(&q, None, |a, b| a.cmp(&b)).expect("acyclic");
        return Ok(realize(vec![order], 1));
    }
    let table = ExtensionTable::build(&q)?;
    let incomparable: Vec<(usize, usize)> =
        (0..n).flat_map(|x| (x + 1..n).map(move |y| (x, y))).filter(|&(x, y)| q.incomparable(x, y)).collect();
    let search = Search { q: &q, table: &table, incomparable: &incomparable };

    for k in 2..=max_k {
        let found = (0..table.len()).into_par_iter().find_map_first(|first| {
            let mut chosen = vec![first];
            search.run(k, &mut chosen)
        });
        if let Some((chosen, last)) = found {
            let mut extensions: Vec<Vec<usize>> = chosen.iter().map(|&i| table.order(i)).collect();
            extensions.push(last);
            return Ok(realize(extensions, k));
        }
    }
    Ok(Dimension::Unknown { max_k })
}

struct Search<'a> {
    q: &'a FinitePreorder,
    table: &'a ExtensionTable,
    incomparable: &'a [(usize, usize)],
}

impl Search<'_> {
    /// Extends `chosen` (increasing indices) to `k - 1` members, then tries to
    /// close the realizer with a forced last extension.
    fn run(&self, k: usize, chosen: &mut Vec<usize>) -> Option<(Vec<usize>, Vec<usize>)> {
        if chosen.len() == k - 1 {
            return self.close(chosen).map(|last| (chosen.clone(), last));
        }
        let start = *chosen.last().expect("nonempty") + 1;
        for next in start..self.table.len() {
            chosen.push(next);
            if let Some(hit) = self.run(k, chosen) {
                return Some(hit);
            }
            chosen.pop();
        }
        None
    }

    /// The extension reversing every incomparable pair seen in only one
    /// orientation so far, if one exists.
    fn close(&self, chosen: &[usize]) -> Option<Vec<usize>> {
        let n = self.q.n();
        let mut before = vec![vec![false; n]; n];
        for &(x, y) in self.incomparable {
            let x_first = chosen.iter().any(|&i| self.table.rank(i)[x] < self.table.rank(i)[y]);
            let y_first = chosen.iter().any(|&i| self.table.rank(i)[y] < self.table.rank(i)[x]);
            match (x_first, y_first) {
                (true, false) => before[y][x] = true,
                (false, true) => before[x][y] = true,
                _ => {}
            }
        }
        constrained_sort(self.q, Some(&before), |a, b| a.cmp(&b))
    }
}
