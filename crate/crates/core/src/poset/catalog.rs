//! Small named posets used in examples and sweeps.

use super::{from_relation, FinitePreorder};

/// Labels of the six-element sign/modulus posets, in index order.
pub const SIGN_MODULUS_LABELS: [&str; 6] = ["-x", "-y", "-z", "x", "y", "z"];

/// Real points standing for the labels, with `x, y, z = 1, 2, 3`.
pub const SIGN_MODULUS_POINTS: [f64; 6] = [-1.0, -2.0, -3.0, 1.0, 2.0, 3.0];

pub fn chain(n: usize) -> FinitePreorder {
    let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    from_relation(n, &pairs).expect("indices in range")
}

pub fn antichain(n: usize) -> FinitePreorder {
    from_relation(n, &[]).expect("no pairs")
}

/// Standard example `S_k`: `a_i = i`, `b_j = k + j`, `a_i < b_j` iff `i != j`.
pub fn standard_example(k: usize) -> FinitePreorder {
    let pairs: Vec<_> = (0..k).flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, k + j))).collect();
    from_relation(2 * k, &pairs).expect("indices in range")
}

/// Two minimal elements below a common top.
pub fn v_poset() -> FinitePreorder {
    from_relation(3, &[(0, 2), (1, 2)]).expect("indices in range")
}

/// `w ⪯ t` iff `|w| <= |t|` and `sgn(w) <= sgn(t)` on `{±1, ±2, ±3}`.
pub fn sign_modulus_poset() -> FinitePreorder {
    points_poset(|w, t| w.abs() <= t.abs() && w.signum() <= t.signum())
}

/// `u_1(w) = w` paired with `u_2(w) = 1/w` for `w > 0` and `-1/|w|` for `w < 0`.
pub fn reciprocal_utilities() -> [Vec<f64>; 2] {
    let u1 = SIGN_MODULUS_POINTS.to_vec();
    let u2 = SIGN_MODULUS_POINTS.iter().map(|&w| if w > 0.0 { 1.0 / w } else { -1.0 / w.abs() }).collect();
    [u1, u2]
}

/// The order on `{±1, ±2, ±3}` encoded by [`reciprocal_utilities`]: each sign
/// class is an antichain and every negative point lies below every positive one.
pub fn reciprocal_poset() -> FinitePreorder {
    let [u1, u2] = reciprocal_utilities();
    let idx = |w: f64| SIGN_MODULUS_POINTS.iter().position(|&p| p == w).expect("known point");
    points_poset(|w, t| u1[idx(w)] <= u1[idx(t)] && u2[idx(w)] <= u2[idx(t)])
}

fn points_poset(leq: impl Fn(f64, f64) -> bool) -> FinitePreorder {
    let mut pairs = Vec::new();
    for (i, &w) in SIGN_MODULUS_POINTS.iter().enumerate() {
        for (j, &t) in SIGN_MODULUS_POINTS.iter().enumerate() {
            if i != j && leq(w, t) {
                pairs.push((i, j));
            }
        }
    }
    from_relation(6, &pairs).expect("indices in range")
}

/// Every partial order on `0..n` (labelled), `n <= 4`.
pub fn all_partial_orders(n: usize) -> Vec<FinitePreorder> {
    assert!(n <= 4, "exhaustive enumeration is limited to four elements");
    let slots: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << slots.len()) {
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (bit, &(i, j)) in slots.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                leq[i][j] = true;
            }
        }
        if let Ok(p) = FinitePreorder::from_matrix(leq) {
            if p.is_antisymmetric() {
                out.push(p);
            }
        }
    }
    out
}

/// Every partial order on at most four elements, including the empty one.
pub fn all_small_posets() -> Vec<FinitePreorder> {
    (0..=4).flat_map(all_partial_orders).collect()
}
