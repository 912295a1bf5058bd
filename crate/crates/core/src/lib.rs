//! Order-theoretic decision-making toolkit.
//!
//! * [`dist`]: probability vectors, entropy, Boltzmann distributions.
//! * [`majorization`]: the uncertainty preorder, majorization, d-majorization.
//! * [`poset`]: finite preorders, monotones, multi-utilities, dimension.
//! * [`maxent`]: maximum-entropy and bounded-rationality solvers.
//! * [`fluct`]: Markov chains, work statistics, Jarzynski and Crooks checks.
//! * [`domain`]: interval and Cantor domains, Scott topology on finite posets.
//! * [`io`]: file formats shared with the command-line tool.

// matrix code reads more clearly with explicit indices
#![allow(clippy::needless_range_loop)]

pub mod dist;
pub mod domain;
pub mod fluct;
pub mod io;
pub mod majorization;
pub mod maxent;
pub mod poset;
pub mod scalar;

pub use dist::{boltzmann, new_dist, shannon_entropy, Dist, DistError, ExactDist, ScoreVector};
