//! Falsification of candidate families of "second laws": real functions that
//! must stay constant on equivalent pairs, strictly increase along strict
//! pairs and move in both directions across incomparable pairs.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::{compare, MajorizationError, Order, OrderVerdict};
use crate::dist::{shannon_entropy, Dist};
use crate::scalar::{ratio, Scalar};

/// A real-valued function of a distribution.
pub type DistFunctional = Box<dyn Fn(&Dist) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Clause {
    /// Equivalent pair with unequal values.
    Equivalence,
    /// Strict pair where some member fails to strictly increase.
    Strict,
    /// Incomparable pair where the members do not move both ways.
    Incomparable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub pair_index: usize,
    pub clause: Clause,
    pub verdict: OrderVerdict,
    /// Index of the offending family member, when one can be singled out.
    pub member: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SecondLawsReport {
    pub pairs_checked: usize,
    pub violations: Vec<Violation>,
}

impl SecondLawsReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every pair against the three clauses, equivalence first.
///
/// Values within [`crate::scalar::TIE_TOL`] count as equal.
pub fn check_second_laws_family(
    fam: &[DistFunctional],
    pairs: &[(Dist, Dist)],
    order: &Order,
) -> Result<SecondLawsReport, MajorizationError> {
    let mut report = SecondLawsReport { pairs_checked: pairs.len(), violations: Vec::new() };
    for (pair_index, (p, q)) in pairs.iter().enumerate() {
        let verdict = compare(p, q, order)?;
        let values: Vec<(f64, f64)> = fam.iter().map(|f| (f(p), f(q))).collect();
        let mut flag = |clause, member| report.violations.push(Violation { pair_index, clause, verdict, member });
        match verdict {
            OrderVerdict::Equivalent => {
                if let Some(m) = values.iter().position(|(a, b)| !a.eq_tol(b)) {
                    flag(Clause::Equivalence, Some(m));
                }
            }
            OrderVerdict::StrictlyLess | OrderVerdict::StrictlyGreater => {
                let increases = |(a, b): &(f64, f64)| {
                    if verdict == OrderVerdict::StrictlyLess {
                        a.lt_tol(b)
                    } else {
                        b.lt_tol(a)
                    }
                };
                if let Some(m) = values.iter().position(|v| !increases(v)) {
                    flag(Clause::Strict, Some(m));
                }
            }
            OrderVerdict::Incomparable => {
                let up = values.iter().any(|(a, b)| a.lt_tol(b));
                let down = values.iter().any(|(a, b)| b.lt_tol(a));
                if !(up && down) {
                    flag(Clause::Incomparable, None);
                }
            }
        }
    }
    Ok(report)
}

/// The first `count` positive rationals in breadth-first Stern–Brocot order:
/// 1, 1/2, 2, 1/3, 2/3, 3/2, 3, 1/4, ...
pub fn stern_brocot(count: usize) -> Vec<BigRational> {
    // each node carries its bounding fractions (a/b, c/d)
    let mut level: Vec<((i64, i64), (i64, i64))> = vec![((0, 1), (1, 0))];
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut next = Vec::with_capacity(level.len() * 2);
        for &((a, b), (c, d)) in &level {
            let m = (a + c, b + d);
            out.push(ratio(m.0, m.1));
            if out.len() == count {
                break;
            }
            next.push(((a, b), m));
            next.push((m, (c, d)));
        }
        level = next;
    }
    out
}

/// Top-`i` cumulative sum, increasing along `⪯_M`.
pub fn top_sum(i: usize) -> DistFunctional {
    Box::new(move |p: &Dist| p.top_sums()[i - 1])
}

/// `u_i`, increasing along `⪯_U`.
pub fn partial_sum_utility(i: usize) -> DistFunctional {
    Box::new(move |p: &Dist| p.partial_sum_utilities()[i - 1])
}

pub fn entropy() -> DistFunctional {
    Box::new(|p: &Dist| shannon_entropy(p))
}

pub fn neg_entropy() -> DistFunctional {
    Box::new(|p: &Dist| -shannon_entropy(p))
}

/// `{u_i + r H : i = 1..n-1, r in rationals}`, strictly increasing along `≺_U`.
pub fn strict_monotone_family(n: usize, rationals: &[BigRational]) -> Vec<DistFunctional> {
    let mut fam: Vec<DistFunctional> = Vec::new();
    for r in rationals {
        let r = r.to_f64().expect("small rational");
        for i in 1..n {
            fam.push(Box::new(move |p: &Dist| p.partial_sum_utilities()[i - 1] + r * shannon_entropy(p)));
        }
    }
    fam
}
