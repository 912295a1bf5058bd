//! Monotones, multi-utilities, thermodynamic representations and the
//! separation and density properties behind them.
//!
//! Function values are compared with the shared `f64` tolerance.

use serde::{Deserialize, Serialize};

use super::{FinitePreorder, IncreasingSetFamily, PosetError, RealFamily};
use crate::scalar::Scalar;

/// Largest `n` for the exhaustive subset sweep.
pub const OPTIMIZATION_MAX_N: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MonotoneClass {
    pub monotone: bool,
    pub strict: bool,
    pub injective: bool,
}

fn check_len(p: &FinitePreorder, found: usize) -> Result<(), PosetError> {
    if found != p.n() {
        return Err(PosetError::LengthMismatch { expected: p.n(), found });
    }
    Ok(())
}

/// Classifies `f` as monotone, strict (`x ≺ y ⇒ f(x) < f(y)`) and injective
/// on the quotient (`f(x) = f(y) ⇒ x ∼ y`).
pub fn classify_monotone(p: &FinitePreorder, f: &[f64]) -> Result<MonotoneClass, PosetError> {
    check_len(p, f.len())?;
    let n = p.n();
    let pairs = || (0..n).flat_map(|x| (0..n).map(move |y| (x, y)));
    let monotone = pairs().all(|(x, y)| !p.leq(x, y) || f[x].le_tol(&f[y]));
    let strict = monotone && pairs().all(|(x, y)| !p.lt(x, y) || f[x].lt_tol(&f[y]));
    let injective = strict && pairs().all(|(x, y)| !f[x].eq_tol(&f[y]) || p.equiv(x, y));
    Ok(MonotoneClass { monotone, strict, injective })
}

/// `x ⪯ y` iff `u(x) <= u(y)` for every member `u`.
pub fn is_multi_utility(p: &FinitePreorder, fam: &RealFamily) -> Result<bool, PosetError> {
    fam.check_len(p.n())?;
    let n = p.n();
    Ok((0..n).all(|x| (0..n).all(|y| p.leq(x, y) == fam.funcs().iter().all(|u| u[x].le_tol(&u[y])))))
}

/// A multi-utility whose members also encode `≺` by simultaneous strict increase.
pub fn is_strict_monotone_multi_utility(p: &FinitePreorder, fam: &RealFamily) -> Result<bool, PosetError> {
    if !is_multi_utility(p, fam)? {
        return Ok(false);
    }
    let n = p.n();
    Ok((0..n).all(|x| (0..n).all(|y| p.lt(x, y) == fam.funcs().iter().all(|v| v[x].lt_tol(&v[y])))))
}

/// `x ⪯ y` iff every `g` in `G` agrees on `x, y` and `s(x) <= s(y)`.
pub fn is_thermo_representation(p: &FinitePreorder, g: &RealFamily, s: &[f64]) -> Result<bool, PosetError> {
    g.check_len(p.n())?;
    check_len(p, s.len())?;
    let n = p.n();
    Ok((0..n).all(|x| {
        (0..n).all(|y| {
            let conserved = g.funcs().iter().all(|gm| gm[x].eq_tol(&gm[y]));
            p.leq(x, y) == (conserved && s[x].le_tol(&s[y]))
        })
    }))
}

/// Canonical thermodynamic representation: component id of the comparability
/// graph as the single conserved quantity and rank as `s`.
///
/// Exists iff every component is totally preordered; with one component `G`
/// is empty.
pub fn thermo_representation(p: &FinitePreorder) -> Option<(RealFamily, Vec<f64>)> {
    let comp = p.comparability_components();
    let n = p.n();
    let total_within = (0..n).all(|x| (0..n).all(|y| comp[x] != comp[y] || !p.incomparable(x, y)));
    if !total_within {
        return None;
    }
    let s: Vec<f64> = (0..n).map(|x| (0..n).filter(|&y| p.lt(y, x)).count() as f64).collect();
    let many = comp.iter().any(|&c| c != 0);
    let g = if many {
        RealFamily::new(vec![comp.iter().map(|&c| c as f64).collect()]).expect("finite")
    } else {
        RealFamily::empty()
    };
    Some((g, s))
}

/// `{g} ∪ {-g} ∪ {s}`, a multi-utility with `2|G| + 1` members.
pub fn thermo_to_multi_utility(p: &FinitePreorder, g: &RealFamily, s: &[f64]) -> Result<RealFamily, PosetError> {
    if !is_thermo_representation(p, g, s)? {
        return Err(PosetError::NotARepresentation);
    }
    let mut funcs: Vec<Vec<f64>> = g.funcs().to_vec();
    funcs.extend(g.funcs().iter().map(|gm| gm.iter().map(|v| -v).collect::<Vec<_>>()));
    funcs.push(s.to_vec());
    RealFamily::new(funcs)
}

/// `f(x) = Σ_k r^k [x ∈ A_k]` for `r` in `(0, 1/2)`.
///
/// Distinct membership patterns give distinct values; in `f64` this holds for
/// families small enough that `r^len` stays well above the comparison tolerance.
pub fn monotone_from_increasing_sets(fam: &IncreasingSetFamily, n: usize, r: f64) -> Result<Vec<f64>, PosetError> {
    if !(r > 0.0 && r < 0.5) {
        return Err(PosetError::RadixOutOfRange { r });
    }
    let mut f = vec![0.0; n];
    let mut weight = 1.0;
    for k in 0..fam.len() {
        for (x, fx) in f.iter_mut().enumerate() {
            if fam.contains(k, x) {
                *fx += weight;
            }
        }
        weight *= r;
    }
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationMode {
    /// Strict pairs separated, incomparable pairs separated both ways.
    MultiUtility,
    /// Strict pairs separated.
    Strict,
    /// Every non-equivalent pair separated in at least one direction.
    Injective,
}

/// Checks the separation clause of `mode`; a set separates `x` from `y` when
/// it contains `y` but not `x`.
pub fn separation_check(p: &FinitePreorder, fam: &IncreasingSetFamily, mode: SeparationMode) -> bool {
    let n = p.n();
    (0..n).all(|x| {
        (0..n).all(|y| {
            if p.lt(x, y) {
                fam.separates(x, y)
            } else if p.incomparable(x, y) {
                match mode {
                    SeparationMode::MultiUtility => fam.separates(x, y) && fam.separates(y, x),
                    SeparationMode::Strict => true,
                    SeparationMode::Injective => fam.separates(x, y) || fam.separates(y, x),
                }
            } else {
                true
            }
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMode {
    /// `x ≺ y ⇒ x ≺ d ≺ y`
    OrderDense,
    /// `x ≺ y ⇒ x ⪯ d ⪯ y`
    DebreuDense,
    /// `x ⋈ y ⇒ x ⋈ d ≺ y`
    UpperDense,
    /// `x ⋈ y ⇒ x ⋈ d ⪯ y`
    DebreuUpperDense,
}

/// Whether `d` is dense in the sense of `mode`.
pub fn density_check(p: &FinitePreorder, d: &[usize], mode: DensityMode) -> Result<bool, PosetError> {
    if let Some(&index) = d.iter().find(|&&x| x >= p.n()) {
        return Err(PosetError::IndexOutOfRange { index, n: p.n() });
    }
    let n = p.n();
    let witness = |x: usize, y: usize| {
        d.iter().any(|&z| match mode {
            DensityMode::OrderDense => p.lt(x, z) && p.lt(z, y),
            DensityMode::DebreuDense => p.leq(x, z) && p.leq(z, y),
            DensityMode::UpperDense => p.incomparable(x, z) && p.lt(z, y),
            DensityMode::DebreuUpperDense => p.incomparable(x, z) && p.leq(z, y),
        })
    };
    let needs = |x: usize, y: usize| match mode {
        DensityMode::OrderDense | DensityMode::DebreuDense => p.lt(x, y),
        DensityMode::UpperDense | DensityMode::DebreuUpperDense => p.incomparable(x, y),
    };
    Ok((0..n).all(|x| (0..n).all(|y| !needs(x, y) || witness(x, y))))
}

/// For every nonempty subset `B`, each maximiser of `f` on `B` is a maximal
/// element of `B`.
pub fn optimization_principle_check(p: &FinitePreorder, f: &[f64]) -> Result<bool, PosetError> {
    check_len(p, f.len())?;
    let n = p.n();
    if n > OPTIMIZATION_MAX_N {
        return Err(PosetError::ScaleExceeded { n, max: OPTIMIZATION_MAX_N });
    }
    for mask in 1u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|&x| mask >> x & 1 == 1).collect();
        let top = members.iter().map(|&x| f[x]).fold(f64::NEG_INFINITY, f64::max);
        let fails = members.iter().filter(|&&x| f[x].eq_tol(&top)).any(|&x| members.iter().any(|&y| p.lt(x, y)));
        if fails {
            return Ok(false);
        }
    }
    Ok(true)
}
