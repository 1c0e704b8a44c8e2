use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use newton_lab::polygons::IntervalShape;
use serde_json::Value;

use crate::campaign::{run_crosscheck, run_verify};
use crate::commands::{cmd_hasse, cmd_oracle, cmd_polygon};
use crate::config::{ConfigOverrides, ExperimentConfig};
use crate::error::{CliError, Result, EXIT_COUNTEREXAMPLE};

#[derive(Debug, Parser)]
#[command(
    name = "newton-lab",
    version,
    about = "Generic Newton polygons of Laurent exponential sums"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hodge and arithmetic polygons with the convexity report.
    Polygon(ShapeArgs),
    /// The Hasse polynomial and its components.
    Hasse(ShapeArgs),
    /// Verification campaign over coefficient vectors.
    Verify(RunArgs),
    /// Field oracle against the Dwork engine.
    Crosscheck(RunArgs),
    /// Exact L-polynomial of a single vector.
    Oracle(RunArgs),
}

#[derive(Debug, Args)]
pub struct ShapeArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub d: u32,
    #[arg(long, default_value_t = 0)]
    pub e: u32,
    /// Directory for JSON and CSV output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// JSON configuration file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub b: Option<usize>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub e: Option<u32>,
    /// exhaustive | sample | single
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Coefficients a_{-e},..,a_d over F_p, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Option<Vec<i64>>,
    /// oracle | dwork | both
    #[arg(long)]
    pub engines: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON-lines cache of exact L-polynomials.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Largest field size q^k a character sum may enumerate.
    #[arg(long)]
    pub guard: Option<u64>,
    #[arg(long)]
    pub prng: Option<String>,
    /// Fraction of cache hits recomputed for comparison.
    #[arg(long)]
    pub spot_check: Option<f64>,
}

impl RunArgs {
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let file = match &self.config {
            Some(path) => ConfigOverrides::from_file(path)?,
            None => ConfigOverrides::default(),
        };
        let flags = ConfigOverrides {
            p: self.p,
            b: self.b,
            d: self.d,
            e: self.e,
            mode: self.mode.clone(),
            count: self.count,
            seed: self.seed,
            a: self.a.as_ref().map(|a| Value::from(a.clone())),
            engines: self.engines.clone(),
            out: self.out.clone(),
            cache: self.cache.clone(),
            guard: self.guard,
            prng: self.prng.clone(),
            spot_check: self.spot_check,
        };
        file.merged_with(flags).resolve()
    }
}

fn shape_of(args: &ShapeArgs) -> Result<IntervalShape> {
    IntervalShape::new(args.d, args.e).map_err(CliError::from)
}

/// Runs a parsed command, printing its summary; returns the exit code.
pub fn execute(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Polygon(args) => {
            print!(
                "{}",
                cmd_polygon(args.p, shape_of(args)?, args.out.as_deref())?.text
            );
            Ok(0)
        }
        Command::Hasse(args) => {
            print!(
                "{}",
                cmd_hasse(args.p, shape_of(args)?, args.out.as_deref())?.text
            );
            Ok(0)
        }
        Command::Verify(args) => {
            let outcome = run_verify(&args.resolve()?)?;
            print!("{}", outcome.report.summary());
            println!("wall time: {:.3} s", outcome.stats.wall_seconds);
            for c in &outcome.report.counterexamples {
                println!("counterexample {:?} a={} {}", c.kind, c.a, c.detail);
            }
            Ok(if outcome.has_counterexamples() {
                EXIT_COUNTEREXAMPLE
            } else {
                0
            })
        }
        Command::Crosscheck(args) => {
            let outcome = run_crosscheck(&args.resolve()?)?;
            let a = &outcome.report.aggregates;
            println!(
                "identical: {}/{}\ncoefficients match: {}/{}\nstable: {}/{}\nleading terms clean: {}/{}\nfloors clean: {}/{}",
                a.identical, a.instances, a.coefficients_match, a.instances, a.stable, a.instances,
                a.leading_terms_clean, a.instances, a.floors_clean, a.instances
            );
            println!("wall time: {:.3} s", outcome.stats.wall_seconds);
            for c in &outcome.report.counterexamples {
                println!("counterexample {:?} a={} {}", c.kind, c.a, c.detail);
            }
            Ok(if outcome.has_counterexamples() {
                EXIT_COUNTEREXAMPLE
            } else {
                0
            })
        }
        Command::Oracle(args) => {
            print!("{}", cmd_oracle(&args.resolve()?)?.text);
            Ok(0)
        }
    }
}
