use clap::{Args, Subcommand, ValueEnum};
use ordlab::fluct::{
    bootstrap_ci, crooks_check, crooks_mc_curve, crooks_mc_curve_with_band, crooks_rational, delta_f,
    energy_family_from_chain, exact_work_distribution, jarzynski_exact, jarzynski_mc, jarzynski_rational, kde_density,
    sample_backward_paths, sample_paths, simulate, works_of_paths, Direction, EnergyFamily, MarkovChainSpec, Protocol,
    Statistic,
};
use ordlab::io::{parse_chain_json, parse_samples_csv, ChainInput};
use serde_json::json;

use crate::output::{num, parse_grid, read_input, real, Grid, Report, Res};

/// Exact enumeration (the default) or Monte Carlo sampling.
#[derive(Debug, Args)]
pub struct Mode {
    /// Enumerate every path.
    #[arg(long, conflicts_with = "mc")]
    pub exact: bool,
    /// Sample paths instead of enumerating them.
    #[arg(long)]
    pub mc: bool,
    /// Number of sampled paths per direction.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatArg {
    /// Sample mean.
    Mean,
    /// Mean of exp(-beta x).
    MeanExpNeg,
}

#[derive(Debug, Subcommand)]
pub enum FluctCmd {
    /// Average of exp(-beta (W - ΔF)) over the work distribution.
    Jarzynski {
        chain: String,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[command(flatten)]
        mode: Mode,
    },
    /// Both sides of the Crooks relation, exactly or from sampled densities.
    Crooks {
        chain: String,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[command(flatten)]
        mode: Mode,
        /// Evaluation points `min:max:step` for the sampled curve.
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
        grid: Option<Grid>,
        /// Bootstrap resamples for a band around the sampled curve.
        #[arg(long)]
        band: Option<usize>,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
    },
    /// Exact work distribution of one direction.
    Work {
        chain: String,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, value_enum, default_value_t = DirectionArg::Forward)]
        direction: DirectionArg,
    },
    /// Forward and backward work samples of the synthetic protocol.
    Simulate {
        /// Protocol JSON; the built-in protocol when omitted.
        #[arg(long)]
        protocol: Option<String>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Percentile bootstrap interval from a one-column sample file.
    Bootstrap {
        samples: String,
        #[arg(long, default_value_t = 1000)]
        resamples: usize,
        #[arg(long, default_value_t = 0.99)]
        level: f64,
        #[arg(long, value_enum, default_value_t = StatArg::MeanExpNeg)]
        stat: StatArg,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
    },
    /// Coverage of the bootstrap interval for E[exp(-beta (W - ΔF))] = 1 over
    /// repeated simulations with seeds seed, seed + 1, ...
    Calibrate {
        #[arg(long)]
        protocol: Option<String>,
        #[arg(long, default_value_t = 100)]
        reps: u64,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 1000)]
        resamples: usize,
        #[arg(long, default_value_t = 0.99)]
        level: f64,
    },
    /// Gaussian kernel density estimate on a grid.
    Kde {
        samples: String,
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
        grid: Grid,
        #[arg(long, value_parser = real)]
        bandwidth: Option<f64>,
    },
}

fn load_chain(arg: &str) -> Res<ChainInput> {
    let (text, source) = read_input(arg)?;
    Ok(parse_chain_json(&text, &source)?)
}

fn load_protocol(arg: Option<&str>) -> Res<Protocol> {
    match arg {
        None => Ok(Protocol::default()),
        Some(arg) => {
            let (text, source) = read_input(arg)?;
            let p: Protocol = serde_json::from_str(&text).map_err(|e| format!("ParseError at {source}: {e}"))?;
            p.validate()?;
            Ok(p)
        }
    }
}

fn load_samples(arg: &str) -> Res<Vec<f64>> {
    let (text, source) = read_input(arg)?;
    Ok(parse_samples_csv(&text, &source)?)
}

fn sampled_works(spec: &MarkovChainSpec, e: &EnergyFamily, count: usize, seed: u64) -> Res<(Vec<f64>, Vec<f64>)> {
    let fwd = works_of_paths(&sample_paths(spec, count, seed), e)?;
    let bwd = works_of_paths(&sample_backward_paths(spec, count, seed)?, &e.backward())?;
    Ok((fwd, bwd))
}

/// Distinct values in increasing order, merged within `1e-9`.
fn distinct(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
    v
}

pub fn run(cmd: &FluctCmd, seed: u64) -> Res<Report> {
    match cmd {
        FluctCmd::Jarzynski { chain, beta, mode } => {
            let input = load_chain(chain)?;
            let spec = input.to_f64();
            let e = energy_family_from_chain(&spec, *beta)?;
            if mode.mc {
                let value = jarzynski_mc(&spec, &e, mode.samples, seed)?;
                return Ok(Report::json(json!({ "mode": "mc", "samples": mode.samples, "value": value })));
            }
            let mut out = json!({ "mode": "exact", "value": jarzynski_exact(&spec, &e)? });
            if let ChainInput::Exact(exact) = &input {
                out["rational_value"] = json!(jarzynski_rational(exact)?.to_string());
            }
            Ok(Report::json(out))
        }
        FluctCmd::Crooks { chain, beta, mode, grid, band, level } => {
            let input = load_chain(chain)?;
            let spec = input.to_f64();
            let e = energy_family_from_chain(&spec, *beta)?;
            let headers = vec!["w", "lhs", "rhs", "gap"];
            if mode.mc {
                let (fwd, bwd) = sampled_works(&spec, &e, mode.samples, seed)?;
                let df = delta_f(&e);
                let grid = grid.clone().unwrap_or_else(|| distinct(&fwd));
                let curve = match band {
                    Some(r) => crooks_mc_curve_with_band(&fwd, &bwd, *beta, df, &grid, *r, *level, seed)?,
                    None => crooks_mc_curve(&fwd, &bwd, *beta, df, &grid)?,
                };
                let rows =
                    curve.iter().map(|c| vec![num(c.w), num(c.lhs), num(c.rhs), num((c.lhs - c.rhs).abs())]).collect();
                let out = json!({ "mode": "mc", "samples": mode.samples, "delta_f": df, "curve": curve });
                return Ok(Report::with_table(out, headers, rows));
            }
            let report = crooks_check(&spec, &e)?;
            let rows = report
                .points
                .iter()
                .map(|p| vec![num(p.w), num(p.lhs), num(p.rhs), num((p.lhs - p.rhs).abs())])
                .collect();
            let mut out = json!({ "mode": "exact", "report": report });
            if let ChainInput::Exact(exact) = &input {
                let points = crooks_rational(exact)?;
                out["rational_holds"] = json!(points.iter().all(|p| p.holds));
                out["rational_points"] = json!(points);
            }
            Ok(Report::with_table(out, headers, rows))
        }
        FluctCmd::Work { chain, beta, direction } => {
            let spec = load_chain(chain)?.to_f64();
            let e = energy_family_from_chain(&spec, *beta)?;
            let dir = match direction {
                DirectionArg::Forward => Direction::Forward,
                DirectionArg::Backward => Direction::Backward,
            };
            let dist = exact_work_distribution(&spec, &e, dir)?;
            let rows = dist.support.iter().map(|(w, p)| vec![num(*w), num(*p)]).collect();
            let out = json!({ "direction": dir, "delta_f": delta_f(&e), "support": dist.support });
            Ok(Report::with_table(out, vec!["w", "p"], rows))
        }
        FluctCmd::Simulate { protocol, samples } => {
            let protocol = load_protocol(protocol.as_deref())?;
            let run = simulate(&protocol, *samples, seed)?;
            let estimate =
                run.dissipated().iter().map(|w| (-run.beta * w).exp()).sum::<f64>() / run.forward.len() as f64;
            let rows = [("forward", &run.forward), ("backward", &run.backward)]
                .iter()
                .flat_map(|(d, ws)| ws.iter().map(move |w| vec![d.to_string(), num(*w)]))
                .collect();
            let out = json!({ "protocol": protocol, "run": run, "jarzynski_estimate": estimate });
            Ok(Report::with_table(out, vec!["direction", "w"], rows))
        }
        FluctCmd::Bootstrap { samples, resamples, level, stat, beta } => {
            let xs = load_samples(samples)?;
            let stat = match stat {
                StatArg::Mean => Statistic::Mean,
                StatArg::MeanExpNeg => Statistic::MeanExpNeg { beta: *beta },
            };
            let (lo, hi) = bootstrap_ci(&xs, *resamples, *level, stat, seed)?;
            let out = json!({ "statistic": stat, "level": level, "resamples": resamples, "lo": lo, "hi": hi });
            Ok(Report::with_table(out, vec!["lo", "hi"], vec![vec![num(lo), num(hi)]]))
        }
        FluctCmd::Calibrate { protocol, reps, samples, resamples, level } => {
            let protocol = load_protocol(protocol.as_deref())?;
            let stat = Statistic::MeanExpNeg { beta: protocol.beta };
            let mut rows = Vec::new();
            let (mut covered, mut width) = (0u64, 0.0);
            for r in 0..*reps {
                let s = seed.wrapping_add(r);
                let run = simulate(&protocol, *samples, s)?;
                let (lo, hi) = bootstrap_ci(&run.dissipated(), *resamples, *level, stat, s)?;
                let hit = lo <= 1.0 && 1.0 <= hi;
                covered += hit as u64;
                width += hi - lo;
                rows.push(vec![s.to_string(), num(lo), num(hi), hit.to_string()]);
            }
            let out = json!({
                "reps": reps,
                "covered": covered,
                "coverage": covered as f64 / *reps as f64,
                "mean_width": width / *reps as f64,
            });
            Ok(Report::with_table(out, vec!["seed", "lo", "hi", "covers"], rows))
        }
        FluctCmd::Kde { samples, grid, bandwidth } => {
            let kde = kde_density(&load_samples(samples)?, *bandwidth)?;
            let rows: Vec<Vec<String>> = grid.iter().map(|&x| vec![num(x), num(kde.eval(x))]).collect();
            let density: Vec<[f64; 2]> = grid.iter().map(|&x| [x, kde.eval(x)]).collect();
            let out = json!({ "bandwidth": kde.bandwidth(), "density": density });
            Ok(Report::with_table(out, vec!["x", "density"], rows))
        }
    }
}
