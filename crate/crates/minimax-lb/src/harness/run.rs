//! Algorithm sweeps over a parameter grid, with CSV rows and a JSON summary.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::catalog::build_instance;
use super::config::ExperimentConfig;
use super::fmt17;
use crate::algorithms::{run, AlgorithmSpec, StopRule};
use crate::bounds::{lower_bound_curve, validate, LowerBoundQuery};
use crate::error::{Error, Result};
use crate::geo::trial_rng;

pub const CSV_HEADER: [&str; 14] = [
    "case",
    "n",
    "L",
    "mu_x",
    "mu_y",
    "R_x",
    "R_y",
    "eps",
    "algorithm",
    "seed",
    "queries_to_eps",
    "final_gap",
    "budget_N",
    "gap_at_budget",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRow {
    pub query: LowerBoundQuery,
    pub algorithm: String,
    pub seed: u64,
    pub queries_to_eps: Option<u64>,
    pub final_gap: f64,
    pub budget_n: f64,
    pub gap_at_budget: f64,
}

impl TrialRow {
    pub fn record(&self) -> Vec<String> {
        let p = &self.query.params;
        vec![
            self.query.case.to_string(),
            p.n.to_string(),
            fmt17(p.l),
            fmt17(p.mu_x),
            fmt17(p.mu_y),
            fmt17(p.r_x),
            fmt17(p.r_y),
            fmt17(self.query.eps),
            self.algorithm.clone(),
            self.seed.to_string(),
            self.queries_to_eps.map(|q| q.to_string()).unwrap_or_default(),
            fmt17(self.final_gap),
            fmt17(self.budget_n),
            fmt17(self.gap_at_budget),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stats {
    pub count: usize,
    pub mean: f64,
    pub std_err: f64,
    pub median: f64,
    pub q10: f64,
    pub q90: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Stats> {
        let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let count = v.len();
        let mean = v.iter().sum::<f64>() / count as f64;
        let var = if count > 1 { v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64 } else { 0.0 };
        let quantile = |q: f64| {
            let pos = q * (count - 1) as f64;
            let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
            v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
        };
        Some(Stats { count, mean, std_err: (var / count as f64).sqrt(), median: quantile(0.5), q10: quantile(0.1), q90: quantile(0.9) })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupSummary {
    pub query: LowerBoundQuery,
    pub algorithm: String,
    pub m: usize,
    pub depth: usize,
    pub budget_n: f64,
    pub lower_bound_curve: f64,
    pub trials: usize,
    pub reached: usize,
    pub queries_to_eps: Option<Stats>,
    pub final_gap: Option<Stats>,
    pub gap_at_budget: Option<Stats>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Skipped {
    pub query: LowerBoundQuery,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub config_version: u32,
    pub master_seed: u64,
    pub groups: Vec<GroupSummary>,
    pub skipped: Vec<Skipped>,
}

pub struct RunOutput {
    pub rows: Vec<TrialRow>,
    pub summary: RunSummary,
}

/// Runs every (grid point, algorithm, seed) triple. Seed `s` of algorithm
/// `a` draws from stream `(a << 32) | s` of the master seed at every grid
/// point, so grid points share their sampling sequences.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let specs: Vec<AlgorithmSpec> = cfg.algorithms.iter().map(|a| a.spec()).collect();
    let mut skipped = Vec::new();
    let mut points = Vec::new();
    for q in cfg.grid.points(cfg.case) {
        match validate(&q).and_then(|_| build_instance(&q)) {
            Ok((inst, plan)) => points.push((q, inst, plan)),
            Err(e) => {
                eprintln!("skipping {} at {:?}, eps {}: {e}", q.case, q.params, q.eps);
                skipped.push(Skipped { query: q, reason: e.to_string() });
            }
        }
    }
    let tasks: Vec<(usize, usize, u64)> = (0..points.len())
        .flat_map(|g| (0..specs.len()).flat_map(move |a| (0..cfg.seeds).map(move |s| (g, a, s))))
        .collect();
    let rows: Vec<Result<TrialRow>> = tasks
        .par_iter()
        .map(|&(g, a, seed)| {
            let (q, inst, plan) = &points[g];
            let stop = StopRule {
                max_queries: cfg.max_passes * inst.n as u64,
                eps: Some(q.eps),
                halt_at_eps: cfg.halt_at_eps,
                budget: Some(plan.budget_queries()),
                record: false,
            };
            let mut rng = trial_rng(cfg.master_seed, ((a as u64) << 32) | seed);
            let trace = run(inst, &specs[a], &stop, &mut rng)?;
            Ok(TrialRow {
                query: *q,
                algorithm: specs[a].algorithm.to_string(),
                seed,
                queries_to_eps: trace.queries_to_eps,
                final_gap: trace.final_score,
                budget_n: plan.budget,
                gap_at_budget: trace.score_at_budget.unwrap_or(f64::NAN),
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;

    let mut groups = Vec::new();
    let per_group = cfg.seeds as usize;
    for (g, (q, _, plan)) in points.iter().enumerate() {
        for (a, spec) in specs.iter().enumerate() {
            let start = (g * specs.len() + a) * per_group;
            let chunk = &rows[start..start + per_group];
            let reached: Vec<f64> = chunk.iter().filter_map(|r| r.queries_to_eps.map(|v| v as f64)).collect();
            groups.push(GroupSummary {
                query: *q,
                algorithm: spec.algorithm.to_string(),
                m: plan.m,
                depth: plan.depth,
                budget_n: plan.budget,
                lower_bound_curve: lower_bound_curve(q).unwrap_or(f64::NAN),
                trials: chunk.len(),
                reached: reached.len(),
                queries_to_eps: Stats::of(&reached),
                final_gap: Stats::of(&chunk.iter().map(|r| r.final_gap).collect::<Vec<_>>()),
                gap_at_budget: Stats::of(&chunk.iter().map(|r| r.gap_at_budget).collect::<Vec<_>>()),
            });
        }
    }
    let summary = RunSummary { config_version: cfg.version, master_seed: cfg.master_seed, groups, skipped };
    Ok(RunOutput { rows, summary })
}

pub fn write_csv<W: Write>(rows: &[TrialRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `runs.csv` and `summary.json` into `dir`.
pub fn write_outputs(output: &RunOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_csv(&output.rows, std::fs::File::create(dir.join("runs.csv"))?)?;
    let json = serde_json::to_string_pretty(&output.summary)?;
    std::fs::write(dir.join("summary.json"), json).map_err(Error::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> ExperimentConfig {
        ExperimentConfig::from_toml(
            r#"
version = 1
case = "sc"
algorithms = ["svrg", "sgda"]
seeds = 3
master_seed = 5
max_passes = 300

[grid]
n = [8]
l = [32.0]
mu_x = [1.0]
eps = [1e-3, 1e-4, 10.0]
"#,
        )
        .unwrap()
    }

    #[test]
    fn reruns_are_identical_and_invalid_points_skipped() {
        let cfg = config();
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        let mut ca = Vec::new();
        let mut cb = Vec::new();
        write_csv(&a.rows, &mut ca).unwrap();
        write_csv(&b.rows, &mut cb).unwrap();
        assert_eq!(ca, cb);
        assert_eq!(a.summary.skipped.len(), 1);
        assert!(a.summary.skipped[0].reason.contains("q^2 / 18"));
        assert_eq!(a.rows.len(), 2 * 2 * 3);
        let text = String::from_utf8(ca).unwrap();
        assert!(text.starts_with("case,n,L,mu_x,mu_y,R_x,R_y,eps,algorithm,seed,queries_to_eps,final_gap,budget_N,gap_at_budget"));
        for r in &a.rows {
            assert!(validate(&r.query).is_ok());
        }
    }

    #[test]
    fn queries_to_eps_grow_with_accuracy() {
        let a = run_experiment(&config()).unwrap();
        for seed in 0..3 {
            let svrg: Vec<u64> = a
                .rows
                .iter()
                .filter(|r| r.algorithm == "svrg" && r.seed == seed)
                .map(|r| r.queries_to_eps.expect("svrg reaches eps"))
                .collect();
            assert!(svrg.windows(2).all(|w| w[0] <= w[1]), "{svrg:?}");
        }
    }

    #[test]
    fn stats_quantiles() {
        let s = Stats::of(&[1.0, 2.0, 3.0, 4.0, f64::NAN]).unwrap();
        assert_eq!((s.count, s.mean, s.median), (4, 2.5, 2.5));
    }
}
