//! `ordlab`: order-theoretic thermodynamics from the command line.
//!
//! Results go to stdout as `{"result": ..., "meta": {"seed", "version"}}`, or
//! as headered CSV with `--emit csv`. Domain and input errors exit with 1 and
//! a message on stderr; usage errors exit with 2.

mod domain;
mod fluct;
mod majo;
mod maxent;
mod output;
mod poset;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use output::{Report, Res};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "ordlab",
    version,
    about = "Majorization, preorders, maximum entropy, fluctuation theorems and domains"
)]
struct Cli {
    /// Root seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Emit::Json)]
    emit: Emit,
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true, env = "ORDLAB_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Uncertainty preorder, majorization and d-majorization.
    #[command(subcommand)]
    Majo(majo::MajoCmd),
    /// Finite preorders: dimension, extensions and representations.
    #[command(subcommand)]
    Poset(poset::PosetCmd),
    /// Maximum entropy and bounded rationality.
    #[command(subcommand)]
    Maxent(maxent::MaxentCmd),
    /// Work statistics of Markov chains.
    #[command(subcommand)]
    Fluct(fluct::FluctCmd),
    /// Interval and Cantor domains, finite dcpos, pairing.
    #[command(subcommand)]
    Domain(domain::DomainCmd),
}

fn run(cli: &Cli) -> Res<String> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    let report: Report = match &cli.command {
        Command::Majo(c) => majo::run(c)?,
        Command::Poset(c) => poset::run(c)?,
        Command::Maxent(c) => maxent::run(c)?,
        Command::Fluct(c) => fluct::run(c, cli.seed)?,
        Command::Domain(c) => domain::run(c)?,
    };
    match cli.emit {
        Emit::Json => report.render_json(cli.seed),
        Emit::Csv => report.render_csv(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
