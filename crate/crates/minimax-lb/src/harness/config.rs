//! Experiment configuration, read from TOML.
//!
//! ```toml
//! version = 1
//! case = "sc"
//! algorithms = ["svrg", { algorithm = "sgda", step = 0.01 }]
//! seeds = 20
//! master_seed = 7
//! max_passes = 2000
//! halt_at_eps = true
//!
//! [grid]
//! n = [8]
//! l = [32.0]
//! mu_x = [1.0]
//! eps = [1e-3, 1e-4]
//! ```
//!
//! Grid keys that are omitted default to `[0.0]` for `mu_x`/`mu_y` and
//! `[1.0]` for the radii and `delta`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algorithms::{Algorithm, AlgorithmSpec};
use crate::bounds::{Case, LowerBoundQuery, Params};
use crate::error::{Error, Result};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgorithmEntry {
    Name(Algorithm),
    Spec(AlgorithmSpec),
}

impl AlgorithmEntry {
    pub fn spec(&self) -> AlgorithmSpec {
        match self {
            AlgorithmEntry::Name(a) => AlgorithmSpec::new(*a),
            AlgorithmEntry::Spec(s) => s.clone(),
        }
    }
}

fn zero() -> Vec<f64> {
    vec![0.0]
}

fn one() -> Vec<f64> {
    vec![1.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub n: Vec<usize>,
    pub l: Vec<f64>,
    #[serde(default = "zero")]
    pub mu_x: Vec<f64>,
    #[serde(default = "zero")]
    pub mu_y: Vec<f64>,
    #[serde(default = "one")]
    pub r_x: Vec<f64>,
    #[serde(default = "one")]
    pub r_y: Vec<f64>,
    #[serde(default = "one")]
    pub delta: Vec<f64>,
    pub eps: Vec<f64>,
}

impl Grid {
    /// Cartesian product in a fixed order (`eps` varies fastest).
    pub fn points(&self, case: Case) -> Vec<LowerBoundQuery> {
        let mut out = Vec::new();
        for &n in &self.n {
            for &l in &self.l {
                for &mu_x in &self.mu_x {
                    for &mu_y in &self.mu_y {
                        for &r_x in &self.r_x {
                            for &r_y in &self.r_y {
                                for &delta in &self.delta {
                                    for &eps in &self.eps {
                                        let params = Params { n, l, mu_x, mu_y, r_x, r_y, delta };
                                        out.push(LowerBoundQuery { case, params, eps });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

fn default_seeds() -> u64 {
    10
}

fn default_passes() -> u64 {
    1000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub case: Case,
    pub grid: Grid,
    pub algorithms: Vec<AlgorithmEntry>,
    #[serde(default = "default_seeds")]
    pub seeds: u64,
    #[serde(default)]
    pub master_seed: u64,
    /// Query cap in effective passes (`n` queries each).
    #[serde(default = "default_passes")]
    pub max_passes: u64,
    #[serde(default)]
    pub halt_at_eps: bool,
    #[serde(default)]
    pub output_dir: Option<String>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        if cfg.version != CONFIG_VERSION {
            return Err(Error::Config(format!("unsupported config version {}, expected {CONFIG_VERSION}", cfg.version)));
        }
        if cfg.algorithms.is_empty() {
            return Err(Error::Config("no algorithms listed".into()));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
version = 1
case = "sc"
algorithms = ["svrg", { algorithm = "sgda", step = 0.01 }]
seeds = 3

[grid]
n = [8]
l = [32.0]
mu_x = [1.0]
eps = [1e-3, 1e-4]
"#;

    #[test]
    fn parses_the_documented_shape() {
        let cfg = ExperimentConfig::from_toml(SAMPLE).unwrap();
        assert_eq!(cfg.case, Case::Sc);
        assert_eq!(cfg.algorithms[1].spec().step, Some(0.01));
        assert_eq!(cfg.algorithms[0].spec().algorithm, Algorithm::Svrg);
        let pts = cfg.grid.points(cfg.case);
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[1].eps, 1e-4);
        assert_eq!(pts[0].params.r_y, 1.0);
    }

    #[test]
    fn rejects_unknown_versions_and_keys() {
        assert!(ExperimentConfig::from_toml(&SAMPLE.replace("version = 1", "version = 2")).is_err());
        assert!(ExperimentConfig::from_toml(&SAMPLE.replace("seeds = 3", "seeds = 3\nbogus = 1")).is_err());
    }
}
