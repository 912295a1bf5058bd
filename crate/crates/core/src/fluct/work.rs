//! Energy families, work, exact work distributions, Jarzynski and Crooks.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{
    near, satisfies_detailed_balance, stationary_dist, ExactChainSpec, FluctError, MarkovChainSpec, ENERGY_TOL,
};
use crate::scalar::Scalar;

/// Largest number of enumerated paths, `n^(N+1)`.
pub const MAX_ENUMERATED_PATHS: u64 = 10_000_000;
/// Work values closer than this are merged in `f64` mode.
pub const WORK_GROUP_TOL: f64 = 1e-9;

/// Energies `E_0..E_N` at inverse temperature `beta`, with
/// `p_n(x) = exp(-beta E_n(x)) / Z_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyFamily {
    pub beta: f64,
    pub energies: Vec<Vec<f64>>,
    /// `ln Z_n`, computed with a max shift.
    pub log_z: Vec<f64>,
}

fn check_beta(beta: f64) -> Result<(), FluctError> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(FluctError::InvalidBeta { beta })
    }
}

impl EnergyFamily {
    pub fn new(beta: f64, energies: Vec<Vec<f64>>) -> Result<Self, FluctError> {
        check_beta(beta)?;
        let log_z = energies
            .iter()
            .map(|e| {
                let top = e.iter().map(|v| -beta * v).fold(f64::NEG_INFINITY, f64::max);
                top + e.iter().map(|v| (-beta * v - top).exp()).sum::<f64>().ln()
            })
            .collect();
        Ok(EnergyFamily { beta, energies, log_z })
    }

    /// Partition values `Z_n`.
    pub fn z(&self) -> Vec<f64> {
        self.log_z.iter().map(|l| l.exp()).collect()
    }

    /// Checks that the energies reproduce `p_0` and the stationary
    /// distributions of the chain within [`ENERGY_TOL`].
    pub fn validate_against<T: Scalar>(&self, spec: &MarkovChainSpec<T>) -> Result<(), FluctError> {
        if self.energies.len() != spec.steps() + 1 {
            return Err(FluctError::DimensionMismatch {
                what: "energy family".into(),
                expected: spec.steps() + 1,
                found: self.energies.len(),
            });
        }
        let seq = spec.stationary_sequence()?;
        for (step, (e, p)) in self.energies.iter().zip(&seq).enumerate() {
            if e.len() != spec.n() {
                return Err(FluctError::DimensionMismatch {
                    what: format!("energies {step}"),
                    expected: spec.n(),
                    found: e.len(),
                });
            }
            let ok = e
                .iter()
                .zip(p.probs())
                .all(|(ex, px)| ((-self.beta * ex - self.log_z[step]).exp() - px.as_f64()).abs() <= ENERGY_TOL);
            if !ok {
                return Err(FluctError::EnergyMismatch { step });
            }
        }
        Ok(())
    }

    /// Energies seen by the backward process `E_N, E_N, E_{N-1}, ..., E_2, E_0`.
    ///
    /// The backward chain starts in `p_N` and relaxes with `M_N` first, so
    /// its own family repeats `E_N`; `E_0` stands in for `E_1`, which
    /// describes the same distribution when `p_1 = p_0`. With this choice a
    /// reversed path has work exactly `-W` and backward `ΔF` is `-ΔF`.
    pub fn backward(&self) -> Self {
        let len = self.energies.len();
        if len < 2 {
            return self.clone();
        }
        let order: Vec<usize> = std::iter::once(len - 1).chain((2..len).rev()).chain(std::iter::once(0)).collect();
        EnergyFamily {
            beta: self.beta,
            energies: order.iter().map(|&i| self.energies[i].clone()).collect(),
            log_z: order.iter().map(|&i| self.log_z[i]).collect(),
        }
    }
}

/// Gauge `Z_n = 1`: `E_n = -ln(p_n) / beta`.
pub fn energy_family_from_chain<T: Scalar>(spec: &MarkovChainSpec<T>, beta: f64) -> Result<EnergyFamily, FluctError> {
    check_beta(beta)?;
    if let Some(index) = spec.p0.probs().iter().position(|v| *v <= T::zero()) {
        return Err(FluctError::ZeroInitialMass { index });
    }
    let seq = spec.stationary_sequence()?;
    let energies: Vec<Vec<f64>> =
        seq.iter().map(|p| p.probs().iter().map(|v| -v.as_f64().ln() / beta).collect()).collect();
    let log_z = vec![0.0; energies.len()];
    Ok(EnergyFamily { beta, energies, log_z })
}

/// `W = Σ_{k<N} E_{k+1}(x_k) - E_k(x_k)`.
pub fn work_of_path(path: &[usize], e: &EnergyFamily) -> Result<f64, FluctError> {
    let expected = e.energies.len();
    if path.len() != expected {
        return Err(FluctError::BadPathLength { expected, found: path.len() });
    }
    let n = e.energies.first().map_or(0, Vec::len);
    if let Some(&index) = path.iter().find(|&&x| x >= n) {
        return Err(FluctError::IndexOutOfRange { index, len: n });
    }
    Ok(work_unchecked(path, e))
}

pub(crate) fn work_unchecked(path: &[usize], e: &EnergyFamily) -> f64 {
    path.iter()
        .take(e.energies.len().saturating_sub(1))
        .enumerate()
        .map(|(k, &x)| e.energies[k + 1][x] - e.energies[k][x])
        .sum()
}

/// `ΔF = (ln Z_0 - ln Z_N) / beta`.
pub fn delta_f(e: &EnergyFamily) -> f64 {
    match (e.log_z.first(), e.log_z.last()) {
        (Some(first), Some(last)) => (first - last) / e.beta,
        _ => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

/// Support points `(work, probability)` in increasing work order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkDistribution {
    pub support: Vec<(f64, f64)>,
}

impl WorkDistribution {
    /// Probability of the support point within `tol` of `w`, or zero.
    pub fn prob_at(&self, w: f64, tol: f64) -> f64 {
        self.support.iter().filter(|(v, _)| (v - w).abs() <= tol).map(|(_, p)| p).sum()
    }

    pub fn total(&self) -> f64 {
        self.support.iter().map(|(_, p)| p).sum()
    }
}

fn check_scale(n: usize, steps: usize) -> Result<(), FluctError> {
    let paths = (n as u64).checked_pow(steps as u32 + 1);
    match paths {
        Some(p) if p <= MAX_ENUMERATED_PATHS => Ok(()),
        _ => Err(FluctError::ScaleExceeded { paths: format!("{n}^{}", steps + 1), max: MAX_ENUMERATED_PATHS }),
    }
}

/// Visits every path prefix `x_0..x_{N-1}` with positive probability; the
/// final state does not enter the work and sums out.
fn for_each_path<T: Scalar>(spec: &MarkovChainSpec<T>, mut visit: impl FnMut(&[usize], &T)) {
    fn rec<T: Scalar>(spec: &MarkovChainSpec<T>, path: &mut Vec<usize>, prob: T, visit: &mut impl FnMut(&[usize], &T)) {
        let depth = path.len();
        if depth == spec.steps().max(1) {
            visit(path, &prob);
            return;
        }
        for x in 0..spec.n() {
            let step =
                if depth == 0 { spec.p0.probs()[x].clone() } else { spec.mats[depth - 1][x][path[depth - 1]].clone() };
            if step.is_zero() {
                continue;
            }
            path.push(x);
            rec(spec, path, prob.clone() * step, visit);
            path.pop();
        }
    }
    rec(spec, &mut Vec::with_capacity(spec.steps()), T::one(), &mut visit);
}

fn group(mut points: Vec<(f64, f64)>) -> WorkDistribution {
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut support: Vec<(f64, f64)> = Vec::new();
    let mut anchor = f64::NAN;
    for (w, p) in points {
        match support.last_mut() {
            Some(last) if (w - anchor).abs() <= WORK_GROUP_TOL => last.1 += p,
            _ => {
                anchor = w;
                support.push((w, p));
            }
        }
    }
    WorkDistribution { support }
}

/// Work distribution by full path enumeration. The backward process starts
/// from `p_N`, applies `M_N, ..., M_1` and uses [`EnergyFamily::backward`].
pub fn exact_work_distribution<T: Scalar>(
    spec: &MarkovChainSpec<T>,
    e: &EnergyFamily,
    direction: Direction,
) -> Result<WorkDistribution, FluctError> {
    check_scale(spec.n(), spec.steps())?;
    if e.energies.len() != spec.steps() + 1 {
        return Err(FluctError::DimensionMismatch {
            what: "energy family".into(),
            expected: spec.steps() + 1,
            found: e.energies.len(),
        });
    }
    let (chain, energies) = match direction {
        Direction::Forward => (spec.clone(), e.clone()),
        Direction::Backward => (spec.reversed()?, e.backward()),
    };
    let mut points = Vec::new();
    for_each_path(&chain, |path, prob| {
        let mut full = path.to_vec();
        full.resize(energies.energies.len(), 0);
        points.push((work_unchecked(&full, &energies), prob.as_f64()));
    });
    Ok(group(points))
}

fn require_positive_start<T: Scalar>(spec: &MarkovChainSpec<T>) -> Result<(), FluctError> {
    if let Some(index) = spec.p0.probs().iter().position(|v| *v <= T::zero()) {
        return Err(FluctError::HypothesisViolated { reason: format!("p0[{index}] is not strictly positive") });
    }
    Ok(())
}

fn require_irreducible<T: Scalar>(spec: &MarkovChainSpec<T>) -> Result<Vec<crate::dist::Dist<T>>, FluctError> {
    spec.stationary_sequence().map_err(|e| match e {
        FluctError::NotIrreducible { matrix } => {
            FluctError::HypothesisViolated { reason: format!("matrix {matrix} is not irreducible") }
        }
        other => other,
    })
}

fn require_crooks<T: Scalar>(spec: &MarkovChainSpec<T>) -> Result<(), FluctError> {
    require_positive_start(spec)?;
    let seq = require_irreducible(spec)?;
    if spec.steps() > 0 && !spec.p0.probs().iter().zip(seq[1].probs()).all(|(a, b)| near(a, b, ENERGY_TOL)) {
        return Err(FluctError::HypothesisViolated { reason: "p0 is not stationary for M_1".into() });
    }
    for (k, m) in spec.mats.iter().enumerate() {
        if !satisfies_detailed_balance(m, &seq[k + 1])? {
            return Err(FluctError::HypothesisViolated {
                reason: format!("matrix {} violates detailed balance", k + 1),
            });
        }
    }
    Ok(())
}

/// `E[exp(-beta (W - ΔF))]` under the forward process.
pub fn jarzynski_exact<T: Scalar>(spec: &MarkovChainSpec<T>, e: &EnergyFamily) -> Result<f64, FluctError> {
    require_positive_start(spec)?;
    require_irreducible(spec)?;
    let dist = exact_work_distribution(spec, e, Direction::Forward)?;
    let df = delta_f(e);
    Ok(dist.support.iter().map(|(w, p)| p * (-e.beta * (w - df)).exp()).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrooksPoint {
    pub w: f64,
    pub forward: f64,
    pub backward: f64,
    /// `ln P^F(w) - ln P^B(-w)`
    pub lhs: f64,
    /// `beta (w - ΔF)`
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrooksReport {
    pub delta_f: f64,
    pub points: Vec<CrooksPoint>,
    pub max_gap: f64,
}

/// Both sides of `P^F(w) / P^B(-w) = exp(beta (w - ΔF))` at every forward
/// support point.
pub fn crooks_check<T: Scalar>(spec: &MarkovChainSpec<T>, e: &EnergyFamily) -> Result<CrooksReport, FluctError> {
    require_crooks(spec)?;
    let fwd = exact_work_distribution(spec, e, Direction::Forward)?;
    let bwd = exact_work_distribution(spec, e, Direction::Backward)?;
    let df = delta_f(e);
    let points: Vec<CrooksPoint> = fwd
        .support
        .iter()
        .map(|&(w, pf)| {
            let pb = bwd.prob_at(-w, WORK_GROUP_TOL);
            CrooksPoint { w, forward: pf, backward: pb, lhs: pf.ln() - pb.ln(), rhs: e.beta * (w - df) }
        })
        .collect();
    let max_gap =
        points
            .iter()
            .map(|p| (p.lhs - p.rhs).abs())
            .fold(0.0, |a: f64, b| if b.is_nan() { f64::INFINITY } else { a.max(b) });
    Ok(CrooksReport { delta_f: df, points, max_gap })
}

/// Exact distribution of the Boltzmann factor `exp(beta W)` in the `Z_n = 1`
/// gauge, where it equals `Π_k p_k(x_k) / p_{k+1}(x_k)` and is rational.
///
/// Keys are factors, values their probabilities.
pub fn exact_factor_distribution(
    spec: &ExactChainSpec,
    direction: Direction,
) -> Result<BTreeMap<BigRational, BigRational>, FluctError> {
    check_scale(spec.n(), spec.steps())?;
    let chain = match direction {
        Direction::Forward => spec.clone(),
        Direction::Backward => spec.reversed()?,
    };
    let seq = chain.stationary_sequence()?;
    let mut out: BTreeMap<BigRational, BigRational> = BTreeMap::new();
    for_each_path(&chain, |path, prob| {
        let mut factor = BigRational::one();
        for (k, &x) in path.iter().enumerate().take(chain.steps()) {
            factor = factor * &seq[k].probs()[x] / &seq[k + 1].probs()[x];
        }
        *out.entry(factor).or_insert_with(BigRational::zero) += prob;
    });
    Ok(out)
}

/// `E[exp(-beta W)]` computed exactly; equals one under the hypotheses.
pub fn jarzynski_rational(spec: &ExactChainSpec) -> Result<BigRational, FluctError> {
    require_positive_start(spec)?;
    require_irreducible(spec)?;
    let dist = exact_factor_distribution(spec, Direction::Forward)?;
    Ok(dist.iter().map(|(factor, p)| p / factor).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalCrooksPoint {
    #[serde(serialize_with = "as_string")]
    pub factor: BigRational,
    #[serde(serialize_with = "as_string")]
    pub forward: BigRational,
    #[serde(serialize_with = "as_string")]
    pub backward: BigRational,
    /// `forward == factor * backward`
    pub holds: bool,
}

fn as_string<S: serde::Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Exact Crooks check: `P^F(w) = exp(beta w) P^B(-w)` with `ΔF = 0`.
pub fn crooks_rational(spec: &ExactChainSpec) -> Result<Vec<RationalCrooksPoint>, FluctError> {
    require_crooks(spec)?;
    let fwd = exact_factor_distribution(spec, Direction::Forward)?;
    let bwd = exact_factor_distribution(spec, Direction::Backward)?;
    Ok(fwd
        .into_iter()
        .map(|(factor, forward)| {
            let backward = bwd.get(&(BigRational::one() / &factor)).cloned().unwrap_or_else(BigRational::zero);
            let holds = forward == &factor * &backward;
            RationalCrooksPoint { factor, forward, backward, holds }
        })
        .collect())
}

/// Converts factor keys `exp(beta w)` into work values.
pub fn factor_to_work(dist: &BTreeMap<BigRational, BigRational>, beta: f64) -> WorkDistribution {
    group(dist.iter().map(|(f, p)| (f.as_f64().ln() / beta, p.as_f64())).collect())
}

/// Stationary distribution check used by the sweeps.
pub fn is_stationary<T: Scalar>(m: &super::Matrix<T>, p: &crate::dist::Dist<T>) -> bool {
    stationary_dist(m).is_ok_and(|s| s.probs().iter().zip(p.probs()).all(|(a, b)| near(a, b, ENERGY_TOL)))
}
