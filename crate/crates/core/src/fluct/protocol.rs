//! Synthetic adaptation protocol: loss models over an angle grid, Metropolis
//! dynamics and forward/backward work samples.

use serde::{Deserialize, Serialize};

use super::{
    delta_f, metropolis_matrix, sample_backward_paths, sample_paths, works_of_paths, EnergyFamily, FluctError,
    MarkovChainSpec, Matrix,
};
use crate::dist::{boltzmann, ScoreVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossKind {
    /// `1 - exp(-(x - (θ + b))²)`
    ExpQuadratic { b: f64 },
    /// Ricker wavelet centred at `θ`, negative exponent.
    MexicanHat { sigma: f64 },
}

/// A loss shape plus the target angle `θ_n` (degrees) of every trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossModel {
    #[serde(flatten)]
    pub kind: LossKind,
    pub theta: Vec<f64>,
}

impl LossModel {
    pub fn validate(&self) -> Result<(), FluctError> {
        match self.kind {
            LossKind::MexicanHat { sigma } if !(sigma > 0.0 && sigma.is_finite()) => {
                Err(FluctError::InvalidParameter { reason: format!("sigma must be positive, got {sigma}") })
            }
            LossKind::ExpQuadratic { b } if !b.is_finite() => {
                Err(FluctError::InvalidParameter { reason: format!("offset b must be finite, got {b}") })
            }
            _ if self.theta.is_empty() => Err(FluctError::InvalidParameter { reason: "theta is empty".into() }),
            _ => Ok(()),
        }
    }
}

/// Loss of angle `x` at trial `n`.
pub fn loss_energy(model: &LossModel, n: usize, x: f64) -> Result<f64, FluctError> {
    let theta = *model.theta.get(n).ok_or(FluctError::IndexOutOfRange { index: n, len: model.theta.len() })?;
    Ok(match model.kind {
        LossKind::ExpQuadratic { b } => 1.0 - (-(x - (theta + b)).powi(2)).exp(),
        LossKind::MexicanHat { sigma } => {
            let z = (x - theta) / sigma;
            2.0 / ((3.0 * sigma).sqrt() * std::f64::consts::PI.powf(0.25)) * (1.0 - z * z) * (-0.5 * z * z).exp()
        }
    })
}

/// `steps + 1` targets rising linearly to `amplitude`, down to `-amplitude`
/// and back, with the given period in trials.
pub fn triangular_schedule(steps: usize, amplitude: f64, period: usize) -> Vec<f64> {
    let period = period.max(1) as f64;
    (0..=steps)
        .map(|k| {
            let phase = (k as f64 / period).fract();
            let tri = if phase < 0.25 {
                4.0 * phase
            } else if phase < 0.75 {
                2.0 - 4.0 * phase
            } else {
                4.0 * phase - 4.0
            };
            amplitude * tri
        })
        .collect()
}

/// Prepends a copy of the first target so the first relaxation keeps `p_0`,
/// as the Crooks relation requires.
pub fn resting_schedule(theta: &[f64]) -> Vec<f64> {
    theta.first().into_iter().chain(theta).copied().collect()
}

/// Equally spaced angles `min, min + step, ..., max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl AngleGrid {
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.min + i as f64 * self.step).collect()
    }
}

/// Synthetic experiment: states are grid angles, `p_n ∝ exp(-beta E_n)` and
/// each trial applies one Metropolis step towards `p_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    pub beta: f64,
    pub grid: AngleGrid,
    pub loss: LossModel,
    /// Proposals move uniformly to any angle within this many grid steps.
    pub proposal_radius: usize,
}

impl Default for Protocol {
    fn default() -> Self {
        Protocol {
            beta: 0.5,
            grid: AngleGrid { min: -3.0, max: 3.0, step: 0.1 },
            loss: LossModel {
                kind: LossKind::ExpQuadratic { b: 0.0 },
                theta: resting_schedule(&triangular_schedule(20, 2.0, 20)),
            },
            proposal_radius: 4,
        }
    }
}

impl Protocol {
    pub fn validate(&self) -> Result<(), FluctError> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(FluctError::InvalidBeta { beta: self.beta });
        }
        if !(self.grid.step > 0.0 && self.grid.max >= self.grid.min) {
            return Err(FluctError::InvalidParameter { reason: "grid needs step > 0 and max >= min".into() });
        }
        if self.proposal_radius == 0 {
            return Err(FluctError::InvalidParameter { reason: "proposal_radius must be positive".into() });
        }
        self.loss.validate()
    }

    /// Number of trials `N`.
    pub fn steps(&self) -> usize {
        self.loss.theta.len() - 1
    }

    pub fn energy_family(&self) -> Result<EnergyFamily, FluctError> {
        self.validate()?;
        let xs = self.grid.points();
        let energies = (0..=self.steps())
            .map(|n| xs.iter().map(|&x| loss_energy(&self.loss, n, x)).collect())
            .collect::<Result<Vec<Vec<f64>>, _>>()?;
        EnergyFamily::new(self.beta, energies)
    }

    fn proposal(&self, n: usize) -> Matrix {
        let r = self.proposal_radius;
        let q = 1.0 / (2 * r + 1) as f64;
        let mut m = vec![vec![0.0; n]; n];
        for y in 0..n {
            for x in y.saturating_sub(r)..(y + r + 1).min(n) {
                if x != y {
                    m[x][y] = q;
                }
            }
            m[y][y] = 1.0 - m.iter().map(|row| row[y]).sum::<f64>();
        }
        m
    }

    /// The Markov chain: `p_0` from `E_0`, `M_n` Metropolis for `p_n`.
    pub fn chain(&self) -> Result<(MarkovChainSpec, EnergyFamily), FluctError> {
        let e = self.energy_family()?;
        let targets = e
            .energies
            .iter()
            .map(|en| Ok(boltzmann(&ScoreVector::new(en.clone())?, -self.beta)?))
            .collect::<Result<Vec<_>, FluctError>>()?;
        let prop = self.proposal(targets[0].len());
        let mats = targets[1..].iter().map(|t| metropolis_matrix(t, &prop)).collect::<Result<Vec<_>, _>>()?;
        Ok((MarkovChainSpec::new(targets[0].clone(), mats)?, e))
    }
}

/// Forward and backward work samples of one simulated session.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationRun {
    pub beta: f64,
    pub delta_f: f64,
    pub forward: Vec<f64>,
    pub backward: Vec<f64>,
}

impl SimulationRun {
    /// Dissipated work `W - ΔF` of the forward samples.
    pub fn dissipated(&self) -> Vec<f64> {
        self.forward.iter().map(|w| w - self.delta_f).collect()
    }
}

/// Samples `count` forward and `count` backward works.
pub fn simulate(protocol: &Protocol, count: usize, seed: u64) -> Result<SimulationRun, FluctError> {
    if count == 0 {
        return Err(FluctError::EmptySamples);
    }
    let (spec, e) = protocol.chain()?;
    let forward = works_of_paths(&sample_paths(&spec, count, seed), &e)?;
    let backward = works_of_paths(&sample_backward_paths(&spec, count, seed)?, &e.backward())?;
    Ok(SimulationRun { beta: e.beta, delta_f: delta_f(&e), forward, backward })
}
