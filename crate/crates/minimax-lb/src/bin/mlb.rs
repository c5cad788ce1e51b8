use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use minimax_lb::bounds::Case;
use minimax_lb::harness::config::{ExperimentConfig, Grid};
use minimax_lb::harness::curve::write_curve;
use minimax_lb::harness::geo_table::write_geo_table;
use minimax_lb::harness::run::{run_experiment, write_outputs};
use minimax_lb::harness::verify::verify;

#[derive(Parser)]
#[command(name = "mlb", version, about = "Hard finite-sum instances, oracle checks and query-complexity experiments")]
struct Cli {
    /// Worker threads for parallel trials (0 = one per core).
    #[arg(long, global = true, env = "MLB_WORKERS", default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the invariant suites; exits nonzero if any check fails.
    Verify {
        /// Only suites whose name contains this string.
        #[arg(long)]
        scope: Option<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Also write verify.json here.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Run an experiment config; writes runs.csv and summary.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output_dir.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Overrides the config's master_seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate a lower-bound curve over a parameter grid.
    Curve(CurveArgs),
    /// Tail table for sums of equal-probability geometric variables.
    Geo {
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 4, 8])]
        m: Vec<usize>,
        /// Success probabilities; 0 stands for 1/m.
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.1, 0.5])]
        p: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long)]
    case: Case,
    /// Read the grid from an experiment config instead of the flags below.
    #[arg(long, conflicts_with_all = ["n", "l", "eps"])]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', required_unless_present = "config")]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', required_unless_present = "config")]
    l: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0])]
    mu_x: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0])]
    mu_y: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0])]
    r_x: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0])]
    r_y: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0])]
    delta: Vec<f64>,
    #[arg(long, value_delimiter = ',', required_unless_present = "config")]
    eps: Vec<f64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

/// Writes to `dir/name` when a directory is given, else to stdout.
fn sink(dir: Option<&Path>, name: &str) -> std::io::Result<Box<dyn Write>> {
    match dir {
        Some(d) => {
            std::fs::create_dir_all(d)?;
            Ok(Box::new(std::fs::File::create(d.join(name))?))
        }
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build_global() {
        eprintln!("mlb: cannot start worker pool: {e}");
        return ExitCode::FAILURE;
    }
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("mlb: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(command: Command) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match command {
        Command::Verify { scope, seed, output_dir } => {
            let reports = verify(scope.as_deref(), seed);
            let mut failed = 0;
            for r in &reports {
                for c in &r.checks {
                    let tag = if c.pass { "PASS" } else { "FAIL" };
                    println!("{tag} {} :: {} ({})", c.suite, c.name, c.detail);
                    failed += usize::from(!c.pass);
                }
                println!("suite {} {} in {:.1}s", r.suite, if r.pass() { "passed" } else { "failed" }, r.seconds);
            }
            if let Some(dir) = output_dir {
                std::fs::create_dir_all(&dir)?;
                std::fs::write(dir.join("verify.json"), serde_json::to_string_pretty(&reports)?)?;
            }
            if reports.is_empty() {
                eprintln!("mlb: scope matched no suites");
                return Ok(ExitCode::FAILURE);
            }
            println!("{failed} failing checks");
            Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Run { config, output_dir, seed } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            let dir = output_dir
                .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("mlb-out"));
            let out = run_experiment(&cfg)?;
            write_outputs(&out, &dir)?;
            println!("{} trials, {} skipped grid points -> {}", out.rows.len(), out.summary.skipped.len(), dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Curve(a) => {
            let grid = match &a.config {
                Some(path) => ExperimentConfig::load(path)?.grid,
                None => Grid {
                    n: a.n,
                    l: a.l,
                    mu_x: a.mu_x,
                    mu_y: a.mu_y,
                    r_x: a.r_x,
                    r_y: a.r_y,
                    delta: a.delta,
                    eps: a.eps,
                },
            };
            write_curve(a.case, &grid, sink(a.output_dir.as_deref(), "curve.csv")?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Geo { m, p, trials, seed, output_dir } => {
            write_geo_table(&m, &p, trials, seed, sink(output_dir.as_deref(), "geo.csv")?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
