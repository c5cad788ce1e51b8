//! Run a small sweep from an in-memory config and print the summary.

use minimax_lb::harness::config::ExperimentConfig;
use minimax_lb::harness::run::{run_experiment, write_csv};

const CONFIG: &str = r#"
version = 1
case = "sc"
algorithms = ["svrg", "sgda"]
seeds = 4
master_seed = 9
max_passes = 500
halt_at_eps = true

[grid]
n = [8]
l = [32.0]
mu_x = [1.0]
eps = [1e-2, 1e-3]
"#;

fn main() -> minimax_lb::Result<()> {
    let cfg = ExperimentConfig::from_toml(CONFIG)?;
    let out = run_experiment(&cfg)?;
    write_csv(&out.rows, std::io::stdout())?;
    for g in &out.summary.groups {
        let median = g.gap_at_budget.as_ref().map(|s| s.median).unwrap_or(f64::NAN);
        println!("{} eps {:e}: median gap at budget {median:.4e}", g.algorithm, g.query.eps);
    }
    Ok(())
}
