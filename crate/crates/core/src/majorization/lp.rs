//! Exact phase-one simplex for the stochastic-matrix formulation of
//! d-majorization: `p ⪯_d q` iff some column-stochastic `Π` has `Π d = d`
//! and `Π q = p`.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{check_len, check_reference, MajorizationError, ORACLE_MAX_N};
use crate::dist::ExactDist;

/// Dense square matrix, `m[row][col]`; columns sum to one.
pub type StochasticMatrix = Vec<Vec<BigRational>>;

/// Decides `p ⪯_d q` by linear feasibility over the `n²` entries of `Π`.
pub fn d_majorization_oracle(p: &ExactDist, q: &ExactDist, d: &ExactDist) -> Result<bool, MajorizationError> {
    Ok(d_majorization_witness(p, q, d)?.is_some())
}

/// Like [`d_majorization_oracle`], returning a feasible `Π` when one exists.
pub fn d_majorization_witness(
    p: &ExactDist,
    q: &ExactDist,
    d: &ExactDist,
) -> Result<Option<StochasticMatrix>, MajorizationError> {
    check_len(p.len(), q.len())?;
    check_len(p.len(), d.len())?;
    let n = p.len();
    if n > ORACLE_MAX_N {
        return Err(MajorizationError::SolverScaleExceeded { n, max: ORACLE_MAX_N });
    }
    check_reference(d)?;
    let var = |i: usize, j: usize| i * n + j;
    let mut rows = Vec::with_capacity(3 * n);
    let mut rhs = Vec::with_capacity(3 * n);
    for j in 0..n {
        let mut row = vec![BigRational::zero(); n * n];
        for i in 0..n {
            row[var(i, j)] = BigRational::one();
        }
        rows.push(row);
        rhs.push(BigRational::one());
    }
    for (target, source) in [(d, d), (p, q)] {
        for i in 0..n {
            let mut row = vec![BigRational::zero(); n * n];
            for j in 0..n {
                row[var(i, j)] = source.probs()[j].clone();
            }
            rows.push(row);
            rhs.push(target.probs()[i].clone());
        }
    }
    Ok(feasible_point(rows, rhs).map(|x| (0..n).map(|i| (0..n).map(|j| x[var(i, j)].clone()).collect()).collect()))
}

/// Finds `x >= 0` with `A x = b`, or `None` when infeasible.
///
/// Phase one of the tableau simplex with one artificial per row, Bland's
/// rule for both entering and leaving choices, exact arithmetic.
pub(crate) fn feasible_point(a: Vec<Vec<BigRational>>, b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let m = a.len();
    let nv = a.first().map_or(0, Vec::len);
    let width = nv + m;
    // tableau rows: [coefficients | artificials | rhs]
    let mut t: Vec<Vec<BigRational>> = a
        .into_iter()
        .zip(b)
        .enumerate()
        .map(|(r, (mut row, rhs))| {
            let flip = rhs.is_negative();
            if flip {
                row.iter_mut().for_each(|v| *v = -v.clone());
            }
            row.extend((0..m).map(|k| if k == r { BigRational::one() } else { BigRational::zero() }));
            row.push(if flip { -rhs } else { rhs });
            row
        })
        .collect();
    let mut basis: Vec<usize> = (nv..width).collect();
    // reduced costs of the phase-one objective (sum of artificials)
    let mut cost: Vec<BigRational> = (0..=width)
        .map(|c| {
            if (nv..width).contains(&c) {
                BigRational::zero()
            } else {
                -t.iter().map(|row| row[c].clone()).sum::<BigRational>()
            }
        })
        .collect();

    while let Some(enter) = (0..width).find(|&c| cost[c].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for (r, row) in t.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[width] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let (pr, _) = leave.expect("phase-one objective is bounded below");
        pivot(&mut t, &mut cost, pr, enter);
        basis[pr] = enter;
    }

    if !cost[width].is_zero() {
        return None;
    }
    let mut x = vec![BigRational::zero(); nv];
    for (r, &var) in basis.iter().enumerate() {
        if var < nv {
            x[var] = t[r][width].clone();
        }
    }
    Some(x)
}

fn pivot(t: &mut [Vec<BigRational>], cost: &mut [BigRational], pr: usize, pc: usize) {
    let inv = BigRational::one() / &t[pr][pc];
    t[pr].iter_mut().for_each(|v| *v = &*v * &inv);
    let pivot_row = t[pr].clone();
    for (r, row) in t.iter_mut().enumerate() {
        if r == pr || row[pc].is_zero() {
            continue;
        }
        let f = row[pc].clone();
        row.iter_mut().zip(&pivot_row).for_each(|(v, pv)| *v = &*v - &f * pv);
    }
    let f = cost[pc].clone();
    if !f.is_zero() {
        cost.iter_mut().zip(&pivot_row).for_each(|(v, pv)| *v = &*v - &f * pv);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn ex(pairs: &[(i64, i64)]) -> ExactDist {
        ExactDist::from_ratios(pairs).unwrap()
    }

    fn apply(m: &StochasticMatrix, v: &ExactDist) -> Vec<BigRational> {
        m.iter().map(|row| row.iter().zip(v.probs()).map(|(a, b)| a * b).sum()).collect()
    }

    #[test]
    fn identity_is_feasible_for_equal_inputs() {
        let d = ex(&[(1, 2), (1, 3), (1, 6)]);
        let p = ex(&[(1, 5), (3, 5), (1, 5)]);
        let pi = d_majorization_witness(&p, &p, &d).unwrap().unwrap();
        assert_eq!(apply(&pi, &p), p.probs());
        assert_eq!(apply(&pi, &d), d.probs());
    }

    #[test]
    fn averaging_matrix_reaches_uniform() {
        let u = ExactDist::uniform(3);
        let q = ex(&[(1, 1), (0, 1), (0, 1)]);
        let pi = d_majorization_witness(&u, &q, &u).unwrap().unwrap();
        for col in 0..3 {
            let s: BigRational = (0..3).map(|r| pi[r][col].clone()).sum();
            assert_eq!(s, BigRational::one());
        }
        assert!(pi.iter().flatten().all(|v| !v.is_negative()));
        assert_eq!(apply(&pi, &q), u.probs());
    }

    #[test]
    fn cannot_concentrate_mass() {
        let u = ExactDist::uniform(3);
        let q = ex(&[(1, 1), (0, 1), (0, 1)]);
        assert!(!d_majorization_oracle(&q, &u, &u).unwrap());
    }

    #[test]
    fn rejects_large_instances() {
        let u = ExactDist::uniform(6);
        assert!(matches!(
            d_majorization_oracle(&u, &u, &u),
            Err(MajorizationError::SolverScaleExceeded { n: 6, max: 5 })
        ));
    }

    #[test]
    fn generic_feasibility() {
        // x + y = 1, x - y = 3 has no nonnegative solution
        let a = vec![vec![ratio(1, 1), ratio(1, 1)], vec![ratio(1, 1), ratio(-1, 1)]];
        assert!(feasible_point(a.clone(), vec![ratio(1, 1), ratio(3, 1)]).is_none());
        let x = feasible_point(a, vec![ratio(1, 1), ratio(1, 2)]).unwrap();
        assert_eq!(x, vec![ratio(3, 4), ratio(1, 4)]);
        // negative right-hand side is handled by row flipping
        let a = vec![vec![ratio(-1, 1), ratio(0, 1)]];
        assert_eq!(feasible_point(a, vec![ratio(-2, 1)]).unwrap(), vec![ratio(2, 1), ratio(0, 1)]);
    }
}
