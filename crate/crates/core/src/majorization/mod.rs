//! The uncertainty preorder, majorization and d-majorization.
//!
//! `p ⪯_U q` holds when every top-`i` cumulative sum of `q` is at most the
//! corresponding sum of `p` (q is "more uncertain"). Majorization `⪯_M` is its
//! dual. Relative (d-)majorization compares distributions through the cell
//! splitting embedding `Λ_d`, which maps `d` to the uniform distribution.

mod lp;
pub mod second_laws;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::dist::{Dist, DistError, ExactDist};
use crate::scalar::{common_denominator, Scalar};

pub use lp::{d_majorization_oracle, d_majorization_witness, StochasticMatrix};
pub use second_laws::{
    check_second_laws_family, stern_brocot, strict_monotone_family, Clause, DistFunctional, SecondLawsReport, Violation,
};

/// Largest embedding size `α` that [`lambda_d_embed`] will materialise.
pub const MAX_EMBED_CELLS: usize = 1 << 20;
/// Largest denominator accepted when snapping a float reference distribution.
pub const SNAP_MAX_DEN: u64 = 1024;
/// Largest outcome count handled by the linear-feasibility oracle.
pub const ORACLE_MAX_N: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MajorizationError {
    #[error("LengthMismatch: {left} vs {right} outcomes")]
    LengthMismatch { left: usize, right: usize },
    #[error("ZeroReference: reference distribution has zero mass at outcome {index}")]
    ZeroReference { index: usize },
    #[error("StepBudgetExceeded: path needs more than {budget} steps")]
    StepBudgetExceeded { budget: usize },
    #[error("SolverScaleExceeded: oracle supports n <= {max}, got {n}")]
    SolverScaleExceeded { n: usize, max: usize },
    #[error("EmbeddingTooLarge: embedding would have {cells} cells")]
    EmbeddingTooLarge { cells: String },
    #[error(transparent)]
    Dist(#[from] DistError),
}

/// Outcome of comparing two elements of a preorder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum OrderVerdict {
    StrictlyLess,
    Equivalent,
    StrictlyGreater,
    Incomparable,
}

impl OrderVerdict {
    /// Combines the two directional tests `a ⪯ b` and `b ⪯ a`.
    pub fn from_directions(le: bool, ge: bool) -> Self {
        match (le, ge) {
            (true, true) => Self::Equivalent,
            (true, false) => Self::StrictlyLess,
            (false, true) => Self::StrictlyGreater,
            (false, false) => Self::Incomparable,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Self::StrictlyLess => Self::StrictlyGreater,
            Self::StrictlyGreater => Self::StrictlyLess,
            other => other,
        }
    }
}

/// Which preorder on distributions to use.
#[derive(Debug, Clone, PartialEq)]
pub enum Order {
    /// The uncertainty preorder `⪯_U`.
    Uncertainty,
    /// Majorization `⪯_M`.
    Majorization,
    /// d-majorization `⪯_d` relative to a strictly positive rational `d`.
    Relative(ExactDist),
}

fn check_len(left: usize, right: usize) -> Result<(), MajorizationError> {
    if left != right {
        return Err(MajorizationError::LengthMismatch { left, right });
    }
    Ok(())
}

/// `p ⪯_U q`: `u_i(p) <= u_i(q)` for all `i`.
pub fn uncertainty_leq<T: Scalar>(p: &Dist<T>, q: &Dist<T>) -> Result<bool, MajorizationError> {
    check_len(p.len(), q.len())?;
    let sp = p.top_sums();
    let sq = q.top_sums();
    Ok(sq.iter().zip(&sp).all(|(a, b)| a.le_tol(b)))
}

/// `p ⪯_M q`: every top-`i` sum of `p` is at most that of `q`.
pub fn majorized_by<T: Scalar>(p: &Dist<T>, q: &Dist<T>) -> Result<bool, MajorizationError> {
    uncertainty_leq(q, p)
}

fn check_reference(d: &ExactDist) -> Result<(), MajorizationError> {
    match d.probs().iter().position(|v| v.is_zero()) {
        Some(index) => Err(MajorizationError::ZeroReference { index }),
        None => Ok(()),
    }
}

/// Snaps a float reference distribution to small rationals.
pub fn snap_reference(d: &Dist<f64>) -> Result<ExactDist, MajorizationError> {
    if let Some(index) = d.probs().iter().position(|&v| v <= 0.0) {
        return Err(MajorizationError::ZeroReference { index });
    }
    Ok(d.snap_rational(SNAP_MAX_DEN)?)
}

/// Number of cells `α` of the embedding and the per-outcome cell counts.
pub fn embedding_cells(d: &ExactDist) -> Result<(BigInt, Vec<BigInt>), MajorizationError> {
    check_reference(d)?;
    let alpha = common_denominator(d.probs());
    let cells = d.probs().iter().map(|v| (v * BigRational::from_integer(alpha.clone())).to_integer()).collect();
    Ok((alpha, cells))
}

/// The embedding `Λ_d p(y) = p(x) / (α d(x))` for every cell `y` of outcome `x`.
///
/// Cells are laid out outcome by outcome.
pub fn lambda_d_embed<T: Scalar>(p: &Dist<T>, d: &ExactDist) -> Result<Dist<T>, MajorizationError> {
    check_len(p.len(), d.len())?;
    let (alpha, cells) = embedding_cells(d)?;
    let size = alpha.to_usize().filter(|&a| a <= MAX_EMBED_CELLS);
    let size = size.ok_or_else(|| MajorizationError::EmbeddingTooLarge { cells: alpha.to_string() })?;
    let mut out = Vec::with_capacity(size);
    let alpha_q = BigRational::from_integer(alpha);
    for ((px, dx), count) in p.probs().iter().zip(d.probs()).zip(&cells) {
        let scale = T::from_rational(&(BigRational::one() / (&alpha_q * dx)));
        let value = px.clone() * scale;
        let count = count.to_usize().expect("bounded by alpha");
        out.extend(std::iter::repeat_n(value, count));
    }
    Ok(Dist::from_raw_unchecked(out))
}

/// Relative Lorenz curve of `p` w.r.t. `d`, evaluated at reference mass `t`.
///
/// This is the top-`(α t)` sum of `Λ_d p`, computed on runs of equal cells.
fn relative_lorenz_at<T: Scalar>(order: &[usize], p: &[T], d: &[T], t: &T) -> T {
    let mut mass = T::zero();
    let mut covered = T::zero();
    for &x in order {
        let next = covered.clone() + d[x].clone();
        if next <= *t {
            mass = mass + p[x].clone();
            covered = next;
        } else {
            let slope = p[x].clone() / d[x].clone();
            return mass + (t.clone() - covered) * slope;
        }
    }
    mass
}

fn ratio_order<T: Scalar>(p: &[T], d: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..p.len()).collect();
    idx.sort_by(|&a, &b| {
        let ra = p[a].clone() / d[a].clone();
        let rb = p[b].clone() / d[b].clone();
        rb.partial_cmp(&ra).expect("finite ratios").then(a.cmp(&b))
    });
    idx
}

/// `p ⪯_d q` iff `Λ_d p ⪯_M Λ_d q`.
///
/// Evaluated on runs of equal cells: the Lorenz curve of `Λ_d p` is piecewise
/// linear with breakpoints at the cumulative reference masses, and the curve of
/// `Λ_d q` is concave, so comparing at `p`'s breakpoints decides the relation.
pub fn d_majorization_leq<T: Scalar>(p: &Dist<T>, q: &Dist<T>, d: &ExactDist) -> Result<bool, MajorizationError> {
    check_len(p.len(), q.len())?;
    check_len(p.len(), d.len())?;
    check_reference(d)?;
    let dv: Vec<T> = d.probs().iter().map(T::from_rational).collect();
    let po = ratio_order(p.probs(), &dv);
    let qo = ratio_order(q.probs(), &dv);
    let mut t = T::zero();
    let mut lp = T::zero();
    for &x in &po[..po.len() - 1] {
        t = t + dv[x].clone();
        lp = lp + p.probs()[x].clone();
        let lq = relative_lorenz_at(&qo, q.probs(), &dv, &t);
        if !lp.le_tol(&lq) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Dispatches to the directional tests of the chosen order.
pub fn compare<T: Scalar>(p: &Dist<T>, q: &Dist<T>, order: &Order) -> Result<OrderVerdict, MajorizationError> {
    let (le, ge) = match order {
        Order::Uncertainty => (uncertainty_leq(p, q)?, uncertainty_leq(q, p)?),
        Order::Majorization => (majorized_by(p, q)?, majorized_by(q, p)?),
        Order::Relative(d) => (d_majorization_leq(p, q, d)?, d_majorization_leq(q, p, d)?),
    };
    Ok(OrderVerdict::from_directions(le, ge))
}

/// Moves `mass` from outcome `from` to outcome `to`.
///
/// A swap of two entries is the transfer of their difference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferStep<T: Scalar = f64> {
    pub from: usize,
    pub to: usize,
    #[serde(serialize_with = "serialize_scalar")]
    pub mass: T,
}

fn serialize_scalar<T: Scalar, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    v.serialize_value(s)
}

impl<T: Scalar> TransferStep<T> {
    /// True if the step exchanges the two entries of `before`.
    pub fn is_swap(&self, before: &[T]) -> bool {
        let diff = before[self.from].clone() - before[self.to].clone();
        diff.eq_tol(&self.mass)
    }

    /// Applies the step in place.
    pub fn apply(&self, x: &mut [T]) {
        x[self.from] = x[self.from].clone() - self.mass.clone();
        x[self.to] = x[self.to].clone() + self.mass.clone();
    }
}

/// Replays a transfer path starting from `p`.
pub fn apply_path<T: Scalar>(p: &Dist<T>, steps: &[TransferStep<T>]) -> Vec<T> {
    let mut x = p.probs().to_vec();
    for s in steps {
        s.apply(&mut x);
    }
    x
}

fn desc_order<T: Scalar>(x: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[b].partial_cmp(&x[a]).expect("finite").then(a.cmp(&b)));
    idx
}

/// Synthesises a sequence of equalising transfers (and final swaps) turning
/// `p` into `q`, or `None` when `p ⪯_U q` fails.
///
/// Transfers follow the Hardy–Littlewood–Pólya construction on the sorted
/// vectors, carried out in `p`'s own coordinates, so at most `n - 1` transfers
/// are emitted; swaps then align the rearrangement with `q`.
pub fn pigou_dalton_path<T: Scalar>(
    p: &Dist<T>,
    q: &Dist<T>,
    max_steps: usize,
) -> Result<Option<Vec<TransferStep<T>>>, MajorizationError> {
    if !uncertainty_leq(p, q)? {
        return Ok(None);
    }
    let n = p.len();
    let mut x = p.probs().to_vec();
    let rank = desc_order(&x);
    let target = q.sorted_desc().into_vec();
    let mut steps = Vec::new();
    let push = |steps: &mut Vec<TransferStep<T>>, step: TransferStep<T>| {
        if steps.len() >= max_steps {
            return Err(MajorizationError::StepBudgetExceeded { budget: max_steps });
        }
        steps.push(step);
        Ok(())
    };
    loop {
        let above = |r: usize, x: &[T]| target[r].lt_tol(&x[rank[r]]);
        let below = |r: usize, x: &[T]| x[rank[r]].lt_tol(&target[r]);
        let Some(j) = (0..n).rev().find(|&r| above(r, &x)) else { break };
        let Some(k) = (j + 1..n).find(|&r| below(r, &x)) else { break };
        let give = x[rank[j]].clone() - target[j].clone();
        let take = target[k].clone() - x[rank[k]].clone();
        let mass = if give < take { give } else { take };
        let step = TransferStep { from: rank[j], to: rank[k], mass };
        step.apply(&mut x);
        push(&mut steps, step)?;
    }
    // x is now a rearrangement of q; fix positions with swaps
    let goal = q.probs();
    for i in 0..n {
        if x[i].eq_tol(&goal[i]) {
            continue;
        }
        let j = (i + 1..n)
            .find(|&j| x[j].eq_tol(&goal[i]) && !x[j].eq_tol(&goal[j]))
            .or_else(|| (i + 1..n).find(|&j| x[j].eq_tol(&goal[i])))
            .expect("rearrangement of the target");
        let (from, to) = if x[i] > x[j] { (i, j) } else { (j, i) };
        let step = TransferStep { from, to, mass: x[from].clone() - x[to].clone() };
        step.apply(&mut x);
        push(&mut steps, step)?;
    }
    Ok(Some(steps))
}
