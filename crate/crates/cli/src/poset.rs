use clap::{Args, Subcommand};
use ordlab::io::parse_poset_json;
use ordlab::poset::{
    antichain, chain, classify_monotone, dm_dimension, is_conditionally_connected, is_multi_utility,
    is_strict_monotone_multi_utility, linear_extension_by_monotone, reciprocal_poset, reciprocal_utilities,
    sign_modulus_poset, standard_example, thermo_representation, v_poset, FinitePreorder, RealFamily,
};
use serde_json::{json, Value};

use crate::output::{read_input, Report, Res};

/// A poset from a JSON file (`{"n", "pairs", "labels"}`) or a catalog entry.
#[derive(Debug, Args)]
pub struct PosetSource {
    /// Poset JSON file or inline object.
    #[arg(required_unless_present = "catalog", conflicts_with = "catalog")]
    pub input: Option<String>,
    /// `chain:K`, `antichain:K`, `standard:K`, `v`, `sign-modulus` or `reciprocal`.
    #[arg(long)]
    pub catalog: Option<String>,
}

impl PosetSource {
    pub fn load(&self) -> Res<FinitePreorder> {
        match (&self.input, &self.catalog) {
            (Some(path), _) => {
                let (text, source) = read_input(path)?;
                Ok(parse_poset_json(&text, &source)?.0)
            }
            (None, Some(name)) => catalog(name),
            (None, None) => unreachable!("clap requires an input or --catalog"),
        }
    }
}

fn catalog(name: &str) -> Res<FinitePreorder> {
    let (kind, k) = match name.split_once(':') {
        Some((kind, k)) => (kind, Some(k.parse::<usize>().map_err(|_| format!("bad size in catalog entry {name:?}"))?)),
        None => (name, None),
    };
    Ok(match (kind, k) {
        ("chain", Some(k)) => chain(k),
        ("antichain", Some(k)) => antichain(k),
        ("standard", Some(k)) => standard_example(k),
        ("v", None) => v_poset(),
        ("sign-modulus", None) => sign_modulus_poset(),
        ("reciprocal", None) => reciprocal_poset(),
        _ => return Err(format!("unknown catalog entry {name:?}").into()),
    })
}

/// One real function per element, or a list of them.
fn load_functions(arg: &str) -> Res<Vec<Vec<f64>>> {
    let (text, source) = read_input(arg)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| format!("ParseError at {source}: {e}"))?;
    let as_row = |v: &Value| -> Option<Vec<f64>> { v.as_array()?.iter().map(Value::as_f64).collect() };
    if let Some(row) = as_row(&v) {
        return Ok(vec![row]);
    }
    v.as_array()
        .and_then(|rows| rows.iter().map(as_row).collect::<Option<Vec<_>>>())
        .ok_or_else(|| format!("ParseError at {source}: expected an array of numbers or of number arrays").into())
}

#[derive(Debug, Subcommand)]
pub enum PosetCmd {
    /// Elements, order pairs and basic properties.
    Show {
        #[command(flatten)]
        source: PosetSource,
    },
    /// Dushnik–Miller dimension with a realizer.
    Dim {
        #[command(flatten)]
        source: PosetSource,
        /// Largest realizer size searched.
        #[arg(long, default_value_t = 4)]
        max_k: usize,
    },
    /// Linear extension following a monotone function on incomparable pairs.
    Extend {
        #[command(flatten)]
        source: PosetSource,
        /// Function values, JSON array or file.
        #[arg(long)]
        utility: String,
    },
    /// Monotonicity classes and multi-utility tests for a function family.
    Check {
        #[command(flatten)]
        source: PosetSource,
        /// Functions as a JSON array of arrays; defaults to the reciprocal pair.
        #[arg(long)]
        utilities: Option<String>,
    },
    /// Canonical thermodynamic representation, if one exists.
    Thermo {
        #[command(flatten)]
        source: PosetSource,
    },
}

pub fn run(cmd: &PosetCmd) -> Res<Report> {
    match cmd {
        PosetCmd::Show { source } => {
            let p = source.load()?;
            Ok(Report::json(json!({
                "n": p.n(),
                "pairs": p.pairs(),
                "antisymmetric": p.is_antisymmetric(),
                "total": p.is_total(),
                "conditionally_connected": is_conditionally_connected(&p),
            })))
        }
        PosetCmd::Dim { source, max_k } => {
            let p = source.load()?;
            let dim = dm_dimension(&p, *max_k)?;
            Ok(Report::json(serde_json::to_value(dim)?))
        }
        PosetCmd::Extend { source, utility } => {
            let p = source.load()?;
            let u = load_functions(utility)?;
            let [u] = &u[..] else { return Err("expected a single function".into()) };
            let order = linear_extension_by_monotone(&p, u)?;
            let rows = order.iter().enumerate().map(|(r, x)| vec![r.to_string(), x.to_string()]).collect();
            Ok(Report::with_table(json!({ "extension": order }), vec!["rank", "element"], rows))
        }
        PosetCmd::Check { source, utilities } => {
            let p = source.load()?;
            let funcs = match utilities {
                Some(arg) => load_functions(arg)?,
                None => reciprocal_utilities().to_vec(),
            };
            let classes = funcs.iter().map(|f| classify_monotone(&p, f)).collect::<Result<Vec<_>, _>>()?;
            let fam = RealFamily::new(funcs)?;
            let rows = classes
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    vec![i.to_string(), c.monotone.to_string(), c.strict.to_string(), c.injective.to_string()]
                })
                .collect();
            let out = json!({
                "multi_utility": is_multi_utility(&p, &fam)?,
                "strict_monotone_multi_utility": is_strict_monotone_multi_utility(&p, &fam)?,
                "classes": classes,
            });
            Ok(Report::with_table(out, vec!["function", "monotone", "strict", "injective"], rows))
        }
        PosetCmd::Thermo { source } => {
            let p = source.load()?;
            let rep = thermo_representation(&p).map(|(g, s)| json!({ "g": g.funcs(), "s": s }));
            Ok(Report::json(json!({
                "exists": rep.is_some(),
                "representation": rep,
                "conditionally_connected": is_conditionally_connected(&p),
            })))
        }
    }
}
