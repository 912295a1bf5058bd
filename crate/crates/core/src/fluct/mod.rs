//! Time-inhomogeneous Markov chains and fluctuation theorems.
//!
//! Matrices are column-stochastic: `m[x][y] = P(next = x | prev = y)`.

mod mc;
mod protocol;
mod work;

pub use mc::*;
pub use protocol::*;
pub use work::*;

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::dist::{Dist, DistError, NORM_TOL};
use crate::scalar::Scalar;

/// Tolerance for stationarity and detailed-balance checks in `f64`.
pub const BALANCE_TOL: f64 = 1e-10;
/// Tolerance when comparing supplied energies with stationary distributions.
pub const ENERGY_TOL: f64 = 1e-9;

/// Dense square matrix indexed `m[row][col]`.
pub type Matrix<T = f64> = Vec<Vec<T>>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FluctError {
    #[error("DimensionMismatch: {what} has size {found}, expected {expected}")]
    DimensionMismatch { what: String, expected: usize, found: usize },
    #[error("NotStochastic: matrix {matrix} column {column} sums to {sum}")]
    NotStochastic { matrix: usize, column: usize, sum: f64 },
    #[error("NegativeEntry: matrix {matrix} entry ({row}, {column}) is {value}")]
    NegativeEntry { matrix: usize, row: usize, column: usize, value: f64 },
    #[error("NotIrreducible: matrix {matrix}")]
    NotIrreducible { matrix: usize },
    #[error("NotStationary: the distribution is not fixed by the matrix")]
    NotStationary,
    #[error("ZeroInitialMass: p0[{index}] = 0")]
    ZeroInitialMass { index: usize },
    #[error("ZeroTargetMass: target[{index}] = 0")]
    ZeroTargetMass { index: usize },
    #[error("AsymmetricProposal: entries ({x}, {y}) and ({y}, {x}) differ")]
    AsymmetricProposal { x: usize, y: usize },
    #[error("EnergyMismatch: energies at step {step} do not reproduce the stationary distribution")]
    EnergyMismatch { step: usize },
    #[error("InvalidBeta: beta must be positive and finite, got {beta}")]
    InvalidBeta { beta: f64 },
    #[error("BadPathLength: expected {expected} states, got {found}")]
    BadPathLength { expected: usize, found: usize },
    #[error("IndexOutOfRange: {index} with size {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("ScaleExceeded: {paths} paths exceed the enumeration limit {max}")]
    ScaleExceeded { paths: String, max: u64 },
    #[error("HypothesisViolated: {reason}")]
    HypothesisViolated { reason: String },
    #[error("EmptySamples")]
    EmptySamples,
    #[error("TooFewSamples: need at least {needed}, got {found}")]
    TooFewSamples { needed: usize, found: usize },
    #[error("InvalidParameter: {reason}")]
    InvalidParameter { reason: String },
    #[error(transparent)]
    Dist(#[from] DistError),
}

/// Initial distribution and transition matrices `M_1..M_N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct MarkovChainSpec<T: Scalar = f64> {
    pub p0: Dist<T>,
    #[serde(serialize_with = "serialize_mats")]
    pub mats: Vec<Matrix<T>>,
}

fn serialize_mats<T: Scalar, S: serde::Serializer>(mats: &[Matrix<T>], s: S) -> Result<S::Ok, S::Error> {
    let as_f64: Vec<Vec<Vec<f64>>> =
        mats.iter().map(|m| m.iter().map(|r| r.iter().map(Scalar::as_f64).collect()).collect()).collect();
    serde::Serialize::serialize(&as_f64, s)
}

/// A chain whose entries are exact rationals.
pub type ExactChainSpec = MarkovChainSpec<BigRational>;

/// `|a - b| <= tol` in `f64`, exact equality for rationals.
pub(crate) fn near<T: Scalar>(a: &T, b: &T, tol: f64) -> bool {
    if T::is_exact() {
        a == b
    } else {
        (a.as_f64() - b.as_f64()).abs() <= tol
    }
}

/// Checks squareness, nonnegativity and unit column sums.
pub fn validate_stochastic<T: Scalar>(m: &Matrix<T>, n: usize, matrix: usize) -> Result<(), FluctError> {
    if m.len() != n {
        return Err(FluctError::DimensionMismatch { what: format!("matrix {matrix}"), expected: n, found: m.len() });
    }
    for (row, r) in m.iter().enumerate() {
        if r.len() != n {
            return Err(FluctError::DimensionMismatch {
                what: format!("matrix {matrix} row {row}"),
                expected: n,
                found: r.len(),
            });
        }
        if let Some(column) = r.iter().position(|v| *v < T::zero() || !v.as_f64().is_finite()) {
            return Err(FluctError::NegativeEntry { matrix, row, column, value: r[column].as_f64() });
        }
    }
    for column in 0..n {
        let sum: T = m.iter().map(|r| r[column].clone()).sum();
        if !near(&sum, &T::one(), NORM_TOL) {
            return Err(FluctError::NotStochastic { matrix, column, sum: sum.as_f64() });
        }
    }
    Ok(())
}

impl<T: Scalar> MarkovChainSpec<T> {
    pub fn new(p0: Dist<T>, mats: Vec<Matrix<T>>) -> Result<Self, FluctError> {
        let n = p0.len();
        for (k, m) in mats.iter().enumerate() {
            validate_stochastic(m, n, k + 1)?;
        }
        Ok(MarkovChainSpec { p0, mats })
    }

    /// Number of states.
    pub fn n(&self) -> usize {
        self.p0.len()
    }

    /// Number of transitions `N`.
    pub fn steps(&self) -> usize {
        self.mats.len()
    }

    /// `p_0` followed by the stationary distribution of each `M_n`.
    pub fn stationary_sequence(&self) -> Result<Vec<Dist<T>>, FluctError> {
        let mut out = vec![self.p0.clone()];
        for (k, m) in self.mats.iter().enumerate() {
            out.push(stationary_dist(m).map_err(|e| match e {
                FluctError::NotIrreducible { .. } => FluctError::NotIrreducible { matrix: k + 1 },
                other => other,
            })?);
        }
        Ok(out)
    }

    /// Reverse chain: starts from `p_N` and applies `M_N, ..., M_1`.
    pub fn reversed(&self) -> Result<Self, FluctError> {
        let p_last = match self.mats.last() {
            Some(m) => stationary_dist(m).map_err(|_| FluctError::NotIrreducible { matrix: self.mats.len() })?,
            None => self.p0.clone(),
        };
        Ok(MarkovChainSpec { p0: p_last, mats: self.mats.iter().rev().cloned().collect() })
    }

    pub fn to_f64(&self) -> MarkovChainSpec<f64> {
        MarkovChainSpec {
            p0: self.p0.to_f64(),
            mats: self
                .mats
                .iter()
                .map(|m| m.iter().map(|r| r.iter().map(Scalar::as_f64).collect()).collect())
                .collect(),
        }
    }
}

/// Strong connectivity of the graph with an edge `y -> x` wherever `m[x][y] > 0`.
pub fn is_irreducible<T: Scalar>(m: &Matrix<T>) -> bool {
    let n = m.len();
    if n == 0 {
        return false;
    }
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(y) = stack.pop() {
            for x in 0..n {
                let w = if forward { &m[x][y] } else { &m[y][x] };
                if !seen[x] && *w > T::zero() {
                    seen[x] = true;
                    stack.push(x);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

/// Unique `p` with `M p = p`, by Gaussian elimination on `(M - I) p = 0`
/// with one equation replaced by normalisation.
pub fn stationary_dist<T: Scalar>(m: &Matrix<T>) -> Result<Dist<T>, FluctError> {
    let n = m.len();
    if !is_irreducible(m) {
        return Err(FluctError::NotIrreducible { matrix: 0 });
    }
    let mut a: Vec<Vec<T>> = (0..n)
        .map(|x| {
            let mut row: Vec<T> =
                (0..n).map(|y| if x == y { m[x][y].clone() - T::one() } else { m[x][y].clone() }).collect();
            row.push(T::zero());
            row
        })
        .collect();
    a[n - 1] = vec![T::one(); n + 1];
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).expect("comparable"))
            .expect("nonempty");
        if a[pivot][col].is_zero() {
            return Err(FluctError::NotIrreducible { matrix: 0 });
        }
        a.swap(col, pivot);
        let inv = T::one() / a[col][col].clone();
        for v in a[col].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
        }
    }
    let mut p: Vec<T> = a.into_iter().map(|row| row[n].clone()).collect();
    if !T::is_exact() {
        for v in p.iter_mut() {
            if *v < T::zero() {
                *v = T::zero();
            }
        }
        let s: T = p.iter().cloned().sum();
        p.iter_mut().for_each(|v| *v = v.clone() / s.clone());
    }
    Ok(Dist::new(p)?)
}

fn apply<T: Scalar>(m: &Matrix<T>, p: &[T]) -> Vec<T> {
    m.iter().map(|row| row.iter().zip(p).map(|(a, b)| a.clone() * b.clone()).sum()).collect()
}

/// `m[y][x] p(x) = m[x][y] p(y)` for every pair, after checking `p` is stationary.
pub fn satisfies_detailed_balance<T: Scalar>(m: &Matrix<T>, p: &Dist<T>) -> Result<bool, FluctError> {
    let n = p.len();
    validate_stochastic(m, n, 0)?;
    let mp = apply(m, p.probs());
    if !mp.iter().zip(p.probs()).all(|(a, b)| near(a, b, BALANCE_TOL)) {
        return Err(FluctError::NotStationary);
    }
    let q = p.probs();
    Ok((0..n).all(|x| {
        (0..n).all(|y| near(&(m[y][x].clone() * q[x].clone()), &(m[x][y].clone() * q[y].clone()), BALANCE_TOL))
    }))
}

/// Metropolis chain for `target` from a symmetric `proposal`:
/// off-diagonal `m[x][y] = proposal[x][y] min(1, target(x)/target(y))`,
/// diagonal takes the rejected mass.
pub fn metropolis_matrix<T: Scalar>(target: &Dist<T>, proposal: &Matrix<T>) -> Result<Matrix<T>, FluctError> {
    let n = target.len();
    validate_stochastic(proposal, n, 0)?;
    if let Some(index) = target.probs().iter().position(|v| *v <= T::zero()) {
        return Err(FluctError::ZeroTargetMass { index });
    }
    for x in 0..n {
        for y in x + 1..n {
            if !near(&proposal[x][y], &proposal[y][x], NORM_TOL) {
                return Err(FluctError::AsymmetricProposal { x, y });
            }
        }
    }
    let t = target.probs();
    let mut m = vec![vec![T::zero(); n]; n];
    for y in 0..n {
        let mut moved = T::zero();
        for x in 0..n {
            if x != y {
                let ratio = t[x].clone() / t[y].clone();
                let accept = if ratio < T::one() { ratio } else { T::one() };
                m[x][y] = proposal[x][y].clone() * accept;
                moved = moved + m[x][y].clone();
            }
        }
        m[y][y] = T::one() - moved;
    }
    Ok(m)
}
