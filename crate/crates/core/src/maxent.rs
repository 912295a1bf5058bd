//! Maximum-entropy and bounded-rationality solvers, and grid scans of
//! one-dimensional constraint slices under the uncertainty preorder.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{boltzmann, shannon_entropy, uniform_on, Dist, DistError, ScoreVector};
use crate::scalar::Scalar;

/// Default tolerance on the matched moment or entropy.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Half-width of the initial inverse-temperature bracket.
pub const BETA_BRACKET: f64 = 64.0;
/// Inverse temperature reported when the bound never binds.
pub const BETA_MAX: f64 = 1e3;
/// Targets this close to an extreme of the scores are treated as degenerate.
pub const EDGE_TOL: f64 = 1e-12;
const MAX_ITER: usize = 2000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MaxentError {
    #[error("TargetOutOfRange: target {target} outside [{min}, {max}]")]
    TargetOutOfRange { target: f64, min: f64, max: f64 },
    #[error("InfeasibleBound: {reason}")]
    InfeasibleBound { reason: String },
    #[error("EmptyFeasibleSet: no distribution has mean {target}")]
    EmptyFeasibleSet { target: f64 },
    #[error("InvalidGrid: need at least 2 points, got {grid}")]
    InvalidGrid { grid: usize },
    #[error(transparent)]
    Dist(#[from] DistError),
}

/// `⟨E⟩_p = target`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub energy: ScoreVector,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxentSolution {
    pub dist: Dist,
    /// Inverse temperature; infinite for degenerate targets.
    #[serde(serialize_with = "serialize_extended")]
    pub beta: f64,
    /// The target sits at an extreme of the scores.
    pub degenerate: bool,
}

fn serialize_extended<S: serde::Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// Root of a monotone function on `[lo, hi]` by bisection, stopping once
/// `|g| <= tol` or the bracket stops shrinking.
fn bisect(mut lo: f64, mut hi: f64, tol: f64, g: impl Fn(f64) -> f64) -> f64 {
    let increasing = g(hi) > g(lo);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..MAX_ITER {
        mid = 0.5 * (lo + hi);
        let v = g(mid);
        if v.abs() <= tol || mid <= lo || mid >= hi {
            break;
        }
        if (v < 0.0) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    mid
}

/// Maximum-entropy distribution `p ∝ exp(-β E)` with `⟨E⟩_p = target`.
///
/// Targets at `min E` or `max E` give the uniform distribution on the
/// achieving outcomes with `β = ±∞`.
pub fn solve_maxent(c: &LinearConstraint, tol: f64) -> Result<MaxentSolution, MaxentError> {
    let e = &c.energy;
    let (min, max, t) = (e.min(), e.max(), c.target);
    if !t.is_finite() || t < min - EDGE_TOL || t > max + EDGE_TOL {
        return Err(MaxentError::TargetOutOfRange { target: t, min, max });
    }
    if max - min <= EDGE_TOL {
        return Ok(MaxentSolution { dist: Dist::uniform(e.len()), beta: 0.0, degenerate: false });
    }
    for (edge, beta) in [(min, f64::INFINITY), (max, f64::NEG_INFINITY)] {
        if (t - edge).abs() <= EDGE_TOL {
            let support: Vec<bool> = e.values().iter().map(|v| (v - edge).abs() <= EDGE_TOL).collect();
            return Ok(MaxentSolution { dist: uniform_on(&support), beta, degenerate: true });
        }
    }
    let neg = e.negated();
    let mean = |beta: f64| e.expectation(&boltzmann(&neg, beta).expect("finite beta"));
    // ⟨E⟩ decreases in β
    let (mut lo, mut hi) = (-BETA_BRACKET, BETA_BRACKET);
    while mean(lo) < t {
        lo *= 2.0;
    }
    while mean(hi) > t {
        hi *= 2.0;
    }
    let beta = bisect(lo, hi, tol, |b| mean(b) - t);
    Ok(MaxentSolution { dist: boltzmann(&neg, beta)?, beta, degenerate: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Maximise `⟨U⟩` subject to `H(p) >= H_0`.
    EntropyFloor(f64),
    /// Maximise `H` subject to `⟨U⟩_p >= U_0`.
    UtilityFloor(f64),
}

/// Bounded-rational optimum `p ∝ exp(β U)`, `β >= 0`.
///
/// A bound that never binds short of pure maximisation returns the uniform
/// distribution on `argmax U` with `β` = [`BETA_MAX`].
pub fn solve_bounded_rational(u: &ScoreVector, bound: Bound, tol: f64) -> Result<MaxentSolution, MaxentError> {
    let n = u.len();
    let (min, max) = (u.min(), u.max());
    let at_max: Vec<bool> = u.values().iter().map(|v| (max - v).abs() <= EDGE_TOL).collect();
    let greedy = || MaxentSolution { dist: uniform_on(&at_max), beta: BETA_MAX, degenerate: true };
    let uniform = || MaxentSolution { dist: Dist::uniform(n), beta: 0.0, degenerate: false };
    let gibbs = |beta: f64| boltzmann(u, beta).expect("finite beta");
    match bound {
        Bound::EntropyFloor(h0) => {
            let h_max = (n as f64).ln();
            if !h0.is_finite() || h0 > h_max + tol {
                return Err(MaxentError::InfeasibleBound {
                    reason: format!("entropy floor {h0} exceeds ln n = {h_max}"),
                });
            }
            if max - min <= EDGE_TOL || h0 >= h_max - tol {
                return Ok(uniform());
            }
            let h_greedy = (at_max.iter().filter(|&&a| a).count() as f64).ln();
            if h0 <= h_greedy + tol {
                return Ok(greedy());
            }
            // H decreases in β from ln n towards ln |argmax|
            let mut hi = 1.0;
            while shannon_entropy(&gibbs(hi)) > h0 && hi < f64::MAX / 4.0 {
                hi *= 2.0;
            }
            let beta = bisect(0.0, hi, tol, |b| shannon_entropy(&gibbs(b)) - h0);
            Ok(MaxentSolution { dist: gibbs(beta), beta, degenerate: false })
        }
        Bound::UtilityFloor(u0) => {
            if !u0.is_finite() || u0 > max + EDGE_TOL {
                return Err(MaxentError::InfeasibleBound {
                    reason: format!("utility floor {u0} exceeds max U = {max}"),
                });
            }
            let uniform_mean = u.values().iter().sum::<f64>() / n as f64;
            if u0 <= uniform_mean + tol {
                return Ok(uniform());
            }
            if u0 >= max - EDGE_TOL {
                return Ok(greedy());
            }
            let mut hi = 1.0;
            while u.expectation(&gibbs(hi)) < u0 {
                hi *= 2.0;
            }
            let beta = bisect(0.0, hi, tol, |b| u.expectation(&gibbs(b)) - u0);
            Ok(MaxentSolution { dist: gibbs(beta), beta, degenerate: false })
        }
    }
}

/// Grid scan of the feasible slice `{p : ⟨E⟩_p = target}` for three outcomes
/// (a segment) or two (a point).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentScan {
    /// Endpoints of the slice; equal when it is a single point.
    pub endpoints: [Dist; 2],
    /// Samples `a + t (b - a)` with `t` evenly spaced in `[0, 1]`.
    pub samples: Vec<Dist>,
    /// Indices of samples with no sample strictly above them under `⪯_U`.
    pub maximal: Vec<usize>,
}

impl SegmentScan {
    /// Position `t` in `[0, 1]` of sample `i`.
    pub fn position(&self, i: usize) -> f64 {
        if self.samples.len() <= 1 {
            0.0
        } else {
            i as f64 / (self.samples.len() - 1) as f64
        }
    }
}

/// Vertices of the slice: points supported on at most two outcomes.
fn slice_vertices(e: &[f64], target: f64) -> Vec<Vec<f64>> {
    let n = e.len();
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut push = |v: Vec<f64>| {
        if !out.iter().any(|w| w.iter().zip(&v).all(|(a, b)| (a - b).abs() <= EDGE_TOL)) {
            out.push(v);
        }
    };
    for i in 0..n {
        if (e[i] - target).abs() <= EDGE_TOL {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            push(v);
        }
        for j in i + 1..n {
            if (e[i] - e[j]).abs() <= EDGE_TOL {
                continue;
            }
            let pi = (target - e[j]) / (e[i] - e[j]);
            if (-EDGE_TOL..=1.0 + EDGE_TOL).contains(&pi) {
                let pi = pi.clamp(0.0, 1.0);
                let mut v = vec![0.0; n];
                v[i] = pi;
                v[j] = 1.0 - pi;
                push(v);
            }
        }
    }
    out
}

/// Scans the slice on `grid` evenly spaced points and keeps the `⪯_U`-maximal
/// ones.
///
/// For three outcomes the slice is the segment between its two extreme
/// vertices, returned in outcome-index order of their supports.
pub fn maximal_on_segment(e: &ScoreVector, target: f64, grid: usize) -> Result<SegmentScan, MaxentError> {
    let n = e.len();
    if !(2..=3).contains(&n) {
        return Err(MaxentError::Dist(DistError::LengthMismatch { left: n, right: 3 }));
    }
    if grid < 2 {
        return Err(MaxentError::InvalidGrid { grid });
    }
    if e.max() - e.min() <= EDGE_TOL {
        return Err(MaxentError::InfeasibleBound { reason: "constant scores leave the whole simplex feasible".into() });
    }
    let verts = slice_vertices(e.values(), target);
    let (a, b) = match verts.len() {
        0 => return Err(MaxentError::EmptyFeasibleSet { target }),
        1 => (verts[0].clone(), verts[0].clone()),
        _ => {
            // the two farthest-apart vertices span the segment
            let mut best = (0, 1, -1.0);
            for i in 0..verts.len() {
                for j in i + 1..verts.len() {
                    let d: f64 = verts[i].iter().zip(&verts[j]).map(|(x, y)| (x - y).powi(2)).sum();
                    if d > best.2 {
                        best = (i, j, d);
                    }
                }
            }
            (verts[best.0].clone(), verts[best.1].clone())
        }
    };
    let samples: Vec<Dist> = (0..grid)
        .map(|k| {
            let t = k as f64 / (grid - 1) as f64;
            let raw: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x + t * (y - x)).max(0.0)).collect();
            Dist::new(raw)
        })
        .collect::<Result<_, _>>()?;
    let tops: Vec<Vec<f64>> = samples.iter().map(Dist::top_sums).collect();
    // y strictly above x under ⪯_U: y's top sums are all <= x's, one strictly
    let above = |x: &[f64], y: &[f64]| {
        y.iter().zip(x).all(|(ys, xs)| ys.le_tol(xs)) && y.iter().zip(x).any(|(ys, xs)| ys.lt_tol(xs))
    };
    let maximal: Vec<usize> = (0..grid).into_par_iter().filter(|&i| !tops.iter().any(|t| above(&tops[i], t))).collect();
    Ok(SegmentScan { endpoints: [Dist::new(a)?, Dist::new(b)?], samples, maximal })
}
