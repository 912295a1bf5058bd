//! Path sampling, Monte Carlo estimators, bootstrap intervals and KDE.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::{delta_f, work_unchecked, EnergyFamily, FluctError, MarkovChainSpec};

/// Items handled by one RNG stream. Fixed so that output does not depend on
/// the worker count.
pub const CHUNK: usize = 256;

/// RNG lanes; the stream id is `lane << 40 | chunk index`.
pub const LANE_PATHS: u64 = 0;
pub const LANE_BACKWARD: u64 = 1;
pub const LANE_BOOTSTRAP: u64 = 2;

/// Independent ChaCha stream for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn lane_stream(lane: u64, chunk: usize) -> u64 {
    (lane << 40) | chunk as u64
}

fn draw(column: impl Iterator<Item = f64>, u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (x, p) in column.enumerate() {
        if p > 0.0 {
            last = x;
            acc += p;
            if u < acc {
                return x;
            }
        }
    }
    last
}

fn sample_one(spec: &MarkovChainSpec, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut path = Vec::with_capacity(spec.steps() + 1);
    path.push(draw(spec.p0.probs().iter().copied(), rng.random()));
    for m in &spec.mats {
        let prev = *path.last().unwrap_or(&0);
        path.push(draw(m.iter().map(|r| r[prev]), rng.random()));
    }
    path
}

pub(crate) fn sample_lane(spec: &MarkovChainSpec, count: usize, seed: u64, lane: u64) -> Vec<Vec<usize>> {
    let chunks = count.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = stream_rng(seed, lane_stream(lane, c));
            let len = CHUNK.min(count - c * CHUNK);
            (0..len).map(move |_| sample_one(spec, &mut rng)).collect::<Vec<_>>()
        })
        .collect()
}

/// `count` i.i.d. paths `x_0..x_N`, deterministic in `seed`.
pub fn sample_paths(spec: &MarkovChainSpec, count: usize, seed: u64) -> Vec<Vec<usize>> {
    sample_lane(spec, count, seed, LANE_PATHS)
}

/// Paths of the backward process (start `p_N`, matrices reversed).
pub fn sample_backward_paths(spec: &MarkovChainSpec, count: usize, seed: u64) -> Result<Vec<Vec<usize>>, FluctError> {
    Ok(sample_lane(&spec.reversed()?, count, seed, LANE_BACKWARD))
}

/// Work of each path; paths must come from a chain matching `e`.
pub fn works_of_paths(paths: &[Vec<usize>], e: &EnergyFamily) -> Result<Vec<f64>, FluctError> {
    paths.iter().map(|p| super::work_of_path(p, e)).collect()
}

/// Monte Carlo mean of `exp(-beta (W - ΔF))`.
pub fn jarzynski_mc(spec: &MarkovChainSpec, e: &EnergyFamily, count: usize, seed: u64) -> Result<f64, FluctError> {
    if count == 0 {
        return Err(FluctError::EmptySamples);
    }
    let df = delta_f(e);
    let paths = sample_paths(spec, count, seed);
    if let Some(p) = paths.first() {
        super::work_of_path(p, e)?;
    }
    let sums: Vec<f64> = paths
        .par_chunks(CHUNK)
        .map(|chunk| chunk.iter().map(|p| (-e.beta * (work_unchecked(p, e) - df)).exp()).sum())
        .collect();
    Ok(sums.iter().sum::<f64>() / count as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Statistic {
    Mean,
    /// Mean of `exp(-beta x)`.
    MeanExpNeg {
        beta: f64,
    },
}

/// Mean anchored at the first value so constant inputs reproduce exactly.
fn anchored_mean(values: impl Iterator<Item = f64>, anchor: f64, n: usize) -> f64 {
    anchor + values.map(|v| v - anchor).sum::<f64>() / n as f64
}

/// Type-7 quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Percentile bootstrap interval for `stat`.
pub fn bootstrap_ci(
    samples: &[f64],
    resamples: usize,
    level: f64,
    stat: Statistic,
    seed: u64,
) -> Result<(f64, f64), FluctError> {
    if samples.is_empty() {
        return Err(FluctError::EmptySamples);
    }
    if resamples == 0 {
        return Err(FluctError::InvalidParameter { reason: "resamples must be positive".into() });
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(FluctError::InvalidParameter { reason: format!("level {level} outside (0, 1)") });
    }
    let values: Vec<f64> = match stat {
        Statistic::Mean => samples.to_vec(),
        Statistic::MeanExpNeg { beta } => samples.iter().map(|w| (-beta * w).exp()).collect(),
    };
    let m = values.len();
    let anchor = values[0];
    let mut stats: Vec<f64> = (0..resamples.div_ceil(CHUNK))
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = stream_rng(seed, lane_stream(LANE_BOOTSTRAP, c));
            let len = CHUNK.min(resamples - c * CHUNK);
            let values = &values;
            (0..len)
                .map(move |_| anchored_mean((0..m).map(|_| values[rng.random_range(0..m)]), anchor, m))
                .collect::<Vec<_>>()
        })
        .collect();
    stats.sort_by(f64::total_cmp);
    let alpha = (1.0 - level) / 2.0;
    Ok((quantile(&stats, alpha), quantile(&stats, 1.0 - alpha)))
}

/// Gaussian kernel density estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Kde {
    samples: Vec<f64>,
    bandwidth: f64,
}

/// Silverman's rule `1.06 σ̂ m^(-1/5)`.
pub fn silverman_bandwidth(samples: &[f64]) -> f64 {
    let m = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / m;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    1.06 * var.sqrt() * m.powf(-0.2)
}

pub fn kde_density(samples: &[f64], bandwidth: Option<f64>) -> Result<Kde, FluctError> {
    if samples.len() < 2 {
        return Err(FluctError::TooFewSamples { needed: 2, found: samples.len() });
    }
    let bandwidth = bandwidth.unwrap_or_else(|| silverman_bandwidth(samples));
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(FluctError::InvalidParameter { reason: format!("bandwidth {bandwidth} must be positive") });
    }
    Ok(Kde { samples: samples.to_vec(), bandwidth })
}

impl Kde {
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn eval(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * h * self.samples.len() as f64);
        norm * self.samples.iter().map(|s| (-0.5 * ((x - s) / h).powi(2)).exp()).sum::<f64>()
    }
}

fn finite_or_null<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

/// One grid point of the empirical Crooks curve. Non-finite values mark an
/// empty overlap and serialize as `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub w: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub lhs: f64,
    pub rhs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub band: Option<(f64, f64)>,
}

fn curve_lhs(f: &Kde, b: &Kde, beta: f64, w: f64) -> f64 {
    (f.eval(w) / b.eval(-w)).ln() / beta
}

/// `lhs = ln(ρ^F(w) / ρ^B(-w)) / beta` against `rhs = w - ΔF`.
pub fn crooks_mc_curve(
    forward: &[f64],
    backward: &[f64],
    beta: f64,
    delta_f: f64,
    grid: &[f64],
) -> Result<Vec<CurvePoint>, FluctError> {
    let f = kde_density(forward, None)?;
    let b = kde_density(backward, None)?;
    Ok(grid.iter().map(|&w| CurvePoint { w, lhs: curve_lhs(&f, &b, beta, w), rhs: w - delta_f, band: None }).collect())
}

/// The curve with a percentile bootstrap band from resampling both sample sets.
#[allow(clippy::too_many_arguments)]
pub fn crooks_mc_curve_with_band(
    forward: &[f64],
    backward: &[f64],
    beta: f64,
    delta_f: f64,
    grid: &[f64],
    resamples: usize,
    level: f64,
    seed: u64,
) -> Result<Vec<CurvePoint>, FluctError> {
    let mut curve = crooks_mc_curve(forward, backward, beta, delta_f, grid)?;
    if resamples == 0 || !(level > 0.0 && level < 1.0) {
        return Err(FluctError::InvalidParameter { reason: "band needs resamples > 0 and level in (0, 1)".into() });
    }
    let hf = silverman_bandwidth(forward);
    let hb = silverman_bandwidth(backward);
    let draws: Vec<Vec<f64>> = (0..resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, lane_stream(LANE_BOOTSTRAP, r) | 1 << 39);
            let fs: Vec<f64> = (0..forward.len()).map(|_| forward[rng.random_range(0..forward.len())]).collect();
            let bs: Vec<f64> = (0..backward.len()).map(|_| backward[rng.random_range(0..backward.len())]).collect();
            let f = Kde { samples: fs, bandwidth: hf };
            let b = Kde { samples: bs, bandwidth: hb };
            grid.iter().map(|&w| curve_lhs(&f, &b, beta, w)).collect()
        })
        .collect();
    let alpha = (1.0 - level) / 2.0;
    for (i, point) in curve.iter_mut().enumerate() {
        let mut col: Vec<f64> = draws.iter().map(|d| d[i]).filter(|v| v.is_finite()).collect();
        if col.len() == resamples {
            col.sort_by(f64::total_cmp);
            point.band = Some((quantile(&col, alpha), quantile(&col, 1.0 - alpha)));
        }
    }
    Ok(curve)
}
