use clap::{ArgGroup, Subcommand};
use ordlab::dist::{shannon_entropy, ScoreVector};
use ordlab::io::parse_scores_json;
use ordlab::majorization::{compare, Order, OrderVerdict};
use ordlab::maxent::{maximal_on_segment, solve_bounded_rational, solve_maxent, Bound, LinearConstraint, DEFAULT_TOL};
use serde_json::json;

use crate::output::{load_dist, num, read_input, real, Report, Res};

#[derive(Debug, Subcommand)]
pub enum MaxentCmd {
    /// Maximum-entropy distribution with a prescribed mean energy.
    Solve {
        /// Energies, JSON array or file.
        #[arg(long)]
        energy: String,
        #[arg(long, value_parser = real, allow_hyphen_values = true)]
        target: f64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Uncertainty-maximal points of a mean-energy slice on a grid.
    MaximalSegment {
        #[arg(long)]
        energy: String,
        #[arg(long, value_parser = real, allow_hyphen_values = true)]
        target: f64,
        #[arg(long, default_value_t = 3001)]
        grid: usize,
        /// Also report whether this distribution is dominated on the grid.
        #[arg(long)]
        check: Option<String>,
    },
    /// Bounded-rational optimum under an entropy or utility floor.
    #[command(group(ArgGroup::new("bound").required(true).args(["entropy_floor", "utility_floor"])))]
    Bounded {
        /// Utilities, JSON array or file.
        #[arg(long)]
        utility: String,
        #[arg(long, value_parser = real, allow_hyphen_values = true)]
        entropy_floor: Option<f64>,
        #[arg(long, value_parser = real, allow_hyphen_values = true)]
        utility_floor: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
}

fn load_scores(arg: &str) -> Res<ScoreVector> {
    let (text, source) = read_input(arg)?;
    Ok(parse_scores_json(&text, &source)?)
}

pub fn run(cmd: &MaxentCmd) -> Res<Report> {
    match cmd {
        MaxentCmd::Solve { energy, target, tol } => {
            let energy = load_scores(energy)?;
            let sol = solve_maxent(&LinearConstraint { energy, target: *target }, *tol)?;
            let mut out = serde_json::to_value(&sol)?;
            out["entropy"] = json!(shannon_entropy(&sol.dist));
            Ok(Report::json(out))
        }
        MaxentCmd::Bounded { utility, entropy_floor, utility_floor, tol } => {
            let u = load_scores(utility)?;
            let bound = match (entropy_floor, utility_floor) {
                (Some(h), _) => Bound::EntropyFloor(*h),
                (None, Some(v)) => Bound::UtilityFloor(*v),
                (None, None) => unreachable!("clap requires one bound"),
            };
            let sol = solve_bounded_rational(&u, bound, *tol)?;
            let mut out = serde_json::to_value(&sol)?;
            out["entropy"] = json!(shannon_entropy(&sol.dist));
            out["mean_utility"] = json!(u.expectation(&sol.dist));
            Ok(Report::json(out))
        }
        MaxentCmd::MaximalSegment { energy, target, grid, check } => {
            let e = load_scores(energy)?;
            let scan = maximal_on_segment(&e, *target, *grid)?;
            let ts: Vec<f64> = scan.maximal.iter().map(|&i| scan.position(i)).collect();
            let range = ts.first().zip(ts.last()).map(|(a, b)| [*a, *b]);
            let mut out = json!({
                "endpoints": scan.endpoints,
                "grid": scan.samples.len(),
                "maximal_count": scan.maximal.len(),
                "maximal_range": range,
            });
            if let Some(arg) = check {
                let p = load_dist(arg)?.to_f64();
                let mut dominators = 0usize;
                for s in &scan.samples {
                    if compare(&p, s, &Order::Uncertainty)? == OrderVerdict::StrictlyLess {
                        dominators += 1;
                    }
                }
                out["check"] = json!({ "dist": p, "dominators": dominators, "maximal": dominators == 0, "entropy": shannon_entropy(&p) });
            }
            let maximal: std::collections::HashSet<usize> = scan.maximal.iter().copied().collect();
            let rows = scan
                .samples
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let mut row = vec![num(scan.position(i))];
                    row.extend((0..3).map(|k| s.probs().get(k).map_or_else(String::new, |v| num(*v))));
                    row.push(maximal.contains(&i).to_string());
                    row
                })
                .collect();
            Ok(Report::with_table(out, vec!["t", "p0", "p1", "p2", "maximal"], rows))
        }
    }
}
