use clap::{Subcommand, ValueEnum};
use ordlab::dist::{Dist, ExactDist};
use ordlab::io::{parse_dist_csv, DistInput};
use ordlab::majorization::second_laws::{entropy, top_sum};
use ordlab::majorization::{
    apply_path, check_second_laws_family, compare, d_majorization_oracle, d_majorization_witness, embedding_cells,
    lambda_d_embed, pigou_dalton_path, snap_reference, stern_brocot, strict_monotone_family, DistFunctional, Order,
    OrderVerdict, ORACLE_MAX_N, SNAP_MAX_DEN,
};
use ordlab::scalar::Scalar;
use serde_json::json;

use crate::output::{load_dist, read_input, scalar_text, scalar_value, Report, Res};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    /// Uncertainty preorder.
    U,
    /// Majorization.
    M,
    /// d-majorization, needs `--d`.
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Top-i sums, checked against majorization.
    TopSums,
    /// `u_i + r H` over the first Stern–Brocot rationals, against ⪯_U.
    Corrected,
    /// Shannon entropy alone, against ⪯_U.
    Entropy,
}

#[derive(Debug, Subcommand)]
pub enum MajoCmd {
    /// Compare two distributions.
    Compare {
        #[arg(long, value_enum, default_value_t = OrderArg::U)]
        order: OrderArg,
        /// Reference distribution for `--order d`.
        #[arg(long, required_if_eq("order", "d"))]
        d: Option<String>,
        p: String,
        q: String,
    },
    /// Transfers turning p into q, when p ⪯_U q.
    Path {
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
        p: String,
        q: String,
    },
    /// Cell-splitting embedding of p relative to d.
    Embed {
        #[arg(long)]
        d: String,
        p: String,
    },
    /// Column-stochastic A with A p = q and A d = d, if one exists.
    Witness {
        #[arg(long)]
        d: String,
        p: String,
        q: String,
    },
    /// Checks a functional family on pairs given as consecutive CSV rows.
    SecondLaws {
        #[arg(long, value_enum)]
        family: Family,
        /// Number of rationals for the corrected family.
        #[arg(long, default_value_t = 20)]
        rationals: usize,
        pairs: String,
    },
}

fn reference(arg: &str) -> Res<ExactDist> {
    Ok(match load_dist(arg)? {
        DistInput::Exact(d) => d,
        DistInput::Float(d) => snap_reference(&d)?,
    })
}

fn exact_pair(arg_p: &str, arg_q: &str) -> Res<(ExactDist, ExactDist)> {
    match (load_dist(arg_p)?, load_dist(arg_q)?) {
        (DistInput::Exact(p), DistInput::Exact(q)) => Ok((p, q)),
        (p, q) => Ok((p.to_f64().snap_rational(SNAP_MAX_DEN)?, q.to_f64().snap_rational(SNAP_MAX_DEN)?)),
    }
}

pub fn run(cmd: &MajoCmd) -> Res<Report> {
    match cmd {
        MajoCmd::Compare { order, d, p, q } => {
            let (p, q) = (load_dist(p)?, load_dist(q)?);
            let ord = match order {
                OrderArg::U => Order::Uncertainty,
                OrderArg::M => Order::Majorization,
                OrderArg::D => Order::Relative(reference(d.as_deref().expect("clap requires --d"))?),
            };
            let verdict = match (&p, &q) {
                (DistInput::Exact(p), DistInput::Exact(q)) => compare(p, q, &ord)?,
                _ => compare(&p.to_f64(), &q.to_f64(), &ord)?,
            };
            let leq = matches!(verdict, OrderVerdict::StrictlyLess | OrderVerdict::Equivalent);
            let geq = matches!(verdict, OrderVerdict::StrictlyGreater | OrderVerdict::Equivalent);
            let name = format!("{order:?}").to_lowercase();
            let mut out = json!({ "order": name, "verdict": verdict, "leq": leq, "geq": geq });
            if let (Order::Relative(d), DistInput::Exact(p), DistInput::Exact(q)) = (&ord, &p, &q) {
                if d.len() <= ORACLE_MAX_N {
                    out["oracle_leq"] = json!(d_majorization_oracle(p, q, d)?);
                }
            }
            let row = vec![name, format!("{verdict:?}"), leq.to_string(), geq.to_string()];
            Ok(Report::with_table(out, vec!["order", "verdict", "leq", "geq"], vec![row]))
        }
        MajoCmd::Path { max_steps, p, q } => match (load_dist(p)?, load_dist(q)?) {
            (DistInput::Exact(p), DistInput::Exact(q)) => path_report(&p, &q, *max_steps),
            (p, q) => path_report(&p.to_f64(), &q.to_f64(), *max_steps),
        },
        MajoCmd::Embed { d, p } => {
            let d = reference(d)?;
            let (alpha, cells) = embedding_cells(&d)?;
            let embedded = match load_dist(p)? {
                DistInput::Exact(p) => serde_json::to_value(lambda_d_embed(&p, &d)?)?,
                DistInput::Float(p) => serde_json::to_value(lambda_d_embed(&p, &d)?)?,
            };
            let cells: Vec<String> = cells.iter().map(ToString::to_string).collect();
            Ok(Report::json(json!({ "alpha": alpha.to_string(), "cells": cells, "embedded": embedded })))
        }
        MajoCmd::Witness { d, p, q } => {
            let d = reference(d)?;
            let (p, q) = exact_pair(p, q)?;
            let w = d_majorization_witness(&p, &q, &d)?;
            let matrix: Option<Vec<Vec<String>>> =
                w.as_ref().map(|m| m.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect());
            Ok(Report::json(json!({ "leq": w.is_some(), "matrix": matrix })))
        }
        MajoCmd::SecondLaws { family, rationals, pairs } => {
            let (text, source) = read_input(pairs)?;
            let rows: Vec<Dist> = parse_dist_csv(&text, &source)?.iter().map(DistInput::to_f64).collect();
            if rows.is_empty() || rows.len() % 2 != 0 {
                return Err(format!("{source}: expected an even, nonzero number of rows, found {}", rows.len()).into());
            }
            let n = rows[0].len();
            let pairs: Vec<(Dist, Dist)> = rows.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect();
            let (fam, order): (Vec<DistFunctional>, Order) = match family {
                Family::TopSums => ((1..n).map(top_sum).collect(), Order::Majorization),
                Family::Corrected => (strict_monotone_family(n, &stern_brocot(*rationals)), Order::Uncertainty),
                Family::Entropy => (vec![entropy()], Order::Uncertainty),
            };
            let report = check_second_laws_family(&fam, &pairs, &order)?;
            let rows = report
                .violations
                .iter()
                .map(|v| {
                    let member = v.member.map(|m| m.to_string()).unwrap_or_default();
                    vec![v.pair_index.to_string(), format!("{:?}", v.clause), format!("{:?}", v.verdict), member]
                })
                .collect();
            let out = json!({ "passes": report.passes(), "members": fam.len(), "report": report });
            Ok(Report::with_table(out, vec!["pair", "clause", "verdict", "member"], rows))
        }
    }
}

fn path_report<T: Scalar>(p: &Dist<T>, q: &Dist<T>, max_steps: usize) -> Res<Report> {
    let steps = pigou_dalton_path(p, q, max_steps)?;
    let end = steps.as_ref().map(|s| apply_path(p, s).iter().map(scalar_value).collect::<Vec<_>>());
    let rows =
        steps.iter().flatten().map(|s| vec![s.from.to_string(), s.to.to_string(), scalar_text(&s.mass)]).collect();
    let out = json!({ "reachable": steps.is_some(), "steps": serde_json::to_value(&steps)?, "end": end });
    Ok(Report::with_table(out, vec!["from", "to", "mass"], rows))
}
