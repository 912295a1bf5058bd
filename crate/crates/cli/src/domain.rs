use clap::Subcommand;
use ordlab::domain::{
    bisection_run, cantor_leq, cantor_pair, cantor_sup, cantor_unpair, cantor_way_below, compact_elements,
    interval_interpolate, interval_leq, interval_sup, interval_way_below, order_from_opens_check, scott_opens,
    way_below_matrix, CantorWord, FiniteDcpo, RationalInterval,
};
use ordlab::io::{parse_poly, parse_rational_arg};
use serde_json::json;

use crate::output::{Report, Res};
use crate::poset::PosetSource;

#[derive(Debug, Subcommand)]
pub enum DomainCmd {
    /// Exact bisection of a rational polynomial with a sign change.
    Bisect {
        /// Coefficients in ascending degree, e.g. `[-2,0,1]`.
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, allow_hyphen_values = true)]
        lo: String,
        #[arg(long, allow_hyphen_values = true)]
        hi: String,
        #[arg(long)]
        eps: String,
    },
    /// Cantor pairing of two naturals.
    Pair { n: u64, m: u64 },
    /// Inverse Cantor pairing.
    Unpair { k: u64 },
    /// Scott opens, way-below relation and compact elements of a finite poset.
    Scott {
        #[command(flatten)]
        source: PosetSource,
    },
    /// Information order, way-below and interpolation of two intervals `a,b`.
    Interval {
        #[arg(allow_hyphen_values = true)]
        i: String,
        #[arg(allow_hyphen_values = true)]
        j: String,
    },
    /// Prefix order of two words such as `01` or `0(10)^ω`.
    Cantor {
        x: String,
        y: String,
        #[arg(long, default_value_t = 2)]
        alphabet: usize,
    },
}

pub fn run(cmd: &DomainCmd) -> Res<Report> {
    match cmd {
        DomainCmd::Bisect { poly, lo, hi, eps } => {
            let coeffs = parse_poly(poly, "--poly")?;
            let lo = parse_rational_arg(lo, "--lo")?;
            let hi = parse_rational_arg(hi, "--hi")?;
            let eps = parse_rational_arg(eps, "--eps")?;
            let run = bisection_run(&coeffs, &lo, &hi, &eps)?;
            let rows = run
                .intervals
                .iter()
                .enumerate()
                .map(|(k, i)| vec![k.to_string(), i.lo().to_string(), i.hi().to_string(), i.width().to_string()])
                .collect();
            let out = json!({
                "halvings": run.halvings(),
                "exact_root": run.exact_root,
                "final": run.last(),
                "width": run.last().width().to_string(),
                "intervals": run.intervals,
            });
            Ok(Report::with_table(out, vec!["k", "lo", "hi", "width"], rows))
        }
        DomainCmd::Pair { n, m } => {
            let k = cantor_pair(*n, *m)?;
            Ok(Report::json(json!({ "n": n, "m": m, "pair": k })))
        }
        DomainCmd::Unpair { k } => {
            let (n, m) = cantor_unpair(*k);
            Ok(Report::json(json!({ "pair": k, "n": n, "m": m })))
        }
        DomainCmd::Scott { source } => {
            let d = FiniteDcpo::new(source.load()?)?;
            let wb = way_below_matrix(&d);
            let rows = (0..d.n())
                .flat_map(|x| (0..d.n()).map(move |y| (x, y)))
                .map(|(x, y)| vec![x.to_string(), y.to_string(), d.order().leq(x, y).to_string(), wb[x][y].to_string()])
                .collect();
            let out = json!({
                "n": d.n(),
                "opens": scott_opens(&d),
                "way_below": wb,
                "compact": compact_elements(&d),
                "order_from_opens": order_from_opens_check(&d),
            });
            Ok(Report::with_table(out, vec!["x", "y", "leq", "way_below"], rows))
        }
        DomainCmd::Interval { i, j } => {
            let i: RationalInterval = i.parse()?;
            let j: RationalInterval = j.parse()?;
            let sup = interval_sup(&[i.clone(), j.clone()], true).ok();
            Ok(Report::json(json!({
                "leq": interval_leq(&i, &j),
                "geq": interval_leq(&j, &i),
                "way_below": interval_way_below(&i, &j),
                "interpolant": interval_interpolate(&i, &j),
                "sup": sup,
            })))
        }
        DomainCmd::Cantor { x, y, alphabet } => {
            let x = CantorWord::parse(x, *alphabet)?;
            let y = CantorWord::parse(y, *alphabet)?;
            let sup = cantor_sup(&[x.clone(), y.clone()]).ok();
            Ok(Report::json(json!({
                "x": x,
                "y": y,
                "leq": cantor_leq(&x, &y)?,
                "geq": cantor_leq(&y, &x)?,
                "way_below": cantor_way_below(&x, &y)?,
                "sup": sup,
            })))
        }
    }
}
