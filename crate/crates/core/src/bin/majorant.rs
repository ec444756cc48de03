use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use majorant::generators::{GeneratorConfig, SpectrumProfile};
use majorant::harness::{
    cmd_check, cmd_fuzz, cmd_scan_bourin, default_bourin_grid, parse_grid, parse_range, CheckOptions, FuzzOptions,
    Relation, ScanOptions, EXIT_ERROR,
};
use majorant::{Error, Result, DEFAULT_TOL};

#[derive(Parser)]
#[command(name = "majorant", version, about = "Check, fuzz and scan majorization relations for commuting PSD pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one relation on an instance file and print a record per stage.
    Check(CheckArgs),
    /// Seeded random campaign over one or more relations.
    Fuzz(FuzzArgs),
    /// Scan the Bourin (p, q) grid.
    ScanBourin(ScanArgs),
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "theorem1")]
    relation: String,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    #[arg(long, default_value_t = 0.5)]
    weight: f64,
}

#[derive(Args)]
struct FuzzArgs {
    /// Relation names, repeatable or comma separated; `all` selects every relation.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    relation: Vec<String>,
    #[arg(long, default_value = "1..6")]
    dims: String,
    #[arg(long, default_value = "1..4")]
    pairs: String,
    /// Column range for rectangular frames.
    #[arg(long, default_value = "1..8")]
    columns: String,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, value_delimiter = ',', default_value = "all")]
    profile: Vec<String>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Omit wall times so repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct ScanArgs {
    /// `start:stop:step` or a comma list.
    #[arg(long)]
    p_grid: Option<String>,
    #[arg(long)]
    q_grid: Option<String>,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 50)]
    trials: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value = "uniform")]
    profile: String,
    /// Force `B = A` in every trial.
    #[arg(long)]
    equal_pair: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn relations(names: &[String]) -> Result<Vec<Relation>> {
    if names.iter().any(|n| n == "all") {
        return Ok(Relation::ALL.to_vec());
    }
    names.iter().map(|n| n.parse()).collect()
}

fn profiles(names: &[String]) -> Result<Vec<SpectrumProfile>> {
    if names.iter().any(|n| n == "all") {
        return Ok(SpectrumProfile::ALL.to_vec());
    }
    names.iter().map(|n| n.parse()).collect()
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Usage(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<i32> {
    let mut diag = io::stderr().lock();
    Ok(match cli.command {
        Command::Check(a) => {
            let opts =
                CheckOptions { relation: a.relation.parse()?, tol: a.tol, p: a.p, q: a.q, r: a.r, weight: a.weight };
            cmd_check(&a.input, &opts, &mut BufWriter::new(io::stdout().lock()), &mut diag)
        }
        Command::Fuzz(a) => {
            let config = GeneratorConfig {
                seed: a.seed,
                dims: parse_range(&a.dims)?,
                pairs: parse_range(&a.pairs)?,
                columns: parse_range(&a.columns)?,
                profiles: profiles(&a.profile)?,
            };
            let opts = FuzzOptions {
                relations: relations(&a.relation)?,
                config,
                trials: a.trials,
                tol: a.tol,
                timing: !a.no_timing,
            };
            cmd_fuzz(&opts, &mut sink(&a.output)?, &mut diag)
        }
        Command::ScanBourin(a) => {
            let grid = |g: &Option<String>| g.as_deref().map(parse_grid).unwrap_or_else(|| Ok(default_bourin_grid()));
            let opts = ScanOptions {
                p_grid: grid(&a.p_grid)?,
                q_grid: grid(&a.q_grid)?,
                dim: a.dim,
                trials: a.trials,
                seed: a.seed,
                tol: a.tol,
                profile: a.profile.parse()?,
                equal_pair: a.equal_pair,
            };
            cmd_scan_bourin(&opts, &mut sink(&a.output)?, &mut diag)
        }
    })
}

fn main() -> ExitCode {
    let code = run(Cli::parse()).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        EXIT_ERROR
    });
    ExitCode::from(code as u8)
}
