//! `rankin`: certify the admissibility conditions of a Rankin measure on a
//! concrete pair of forms.
//!
//! Exit codes: 0 every check passed, 1 some check failed, 2 the scenario is
//! invalid or violates a hypothesis of the construction, 3 the truncation plan
//! is over budget.

mod commands;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rankin_core::Error;

use scenario::Scenario;

#[derive(Parser)]
#[command(name = "rankin", version, about = "Exact certification of admissible Rankin measures in positive slope")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hecke polynomial, Newton polygon and slope of f at p.
    Slope(ScenarioArgs),
    /// Run the level, distribution, two-path, divisibility and growth suites.
    Certify(ScenarioArgs),
    /// Mellin integrand and interpolation factor for each character.
    Mellin(ScenarioArgs),
}

/// Flags override the config file, which overrides the defaults.
#[derive(Args)]
struct ScenarioArgs {
    /// TOML file with any of the keys below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    g: Option<String>,
    #[arg(long = "N")]
    n: Option<u64>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    nu_max: Option<u32>,
    #[arg(long)]
    b: Option<u64>,
    #[arg(long)]
    r_max: Option<u32>,
    /// Repeatable: `triv`, `quad` or an exponent vector such as `[1]`.
    #[arg(long)]
    chi: Vec<String>,
    #[arg(long)]
    precision: Option<i64>,
    #[arg(long)]
    budget: Option<u128>,
    #[arg(long)]
    out_len: Option<usize>,
    #[arg(long)]
    check_len: Option<usize>,
    #[arg(long)]
    center: Option<u64>,
    /// Directory for the JSON and TSV reports.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ScenarioArgs {
    fn resolve(self) -> rankin_core::Result<Scenario> {
        let mut s = match &self.config {
            Some(path) => Scenario::from_file(path)?,
            None => Scenario::default(),
        };
        macro_rules! take {
            ($($field:ident),*) => {$(if let Some(v) = self.$field { s.$field = v; })*};
        }
        take!(f, g, n, p, nu_max, b, r_max, precision, budget, out_len, check_len, center);
        if !self.chi.is_empty() {
            s.chi = self.chi;
        }
        if self.out.is_some() {
            s.out = self.out;
        }
        Ok(s)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } => 3,
        Error::Discrepancy(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, run): (ScenarioArgs, fn(&Scenario) -> rankin_core::Result<commands::Outcome>) = match cli.command {
        Command::Slope(a) => (a, commands::slope),
        Command::Certify(a) => (a, commands::certify),
        Command::Mellin(a) => (a, commands::mellin),
    };
    match args.resolve().and_then(|s| run(&s)) {
        Ok(o) if o.pass => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
